#include "cardest/constraint.hpp"

#include <algorithm>
#include <array>

namespace cardest {

namespace {

std::string make_key(ConstraintKind kind, const std::string& id, const std::string& edge, const std::string& name,
                     Predicate op, const Operand& operand) {
    switch (kind) {
        case ConstraintKind::Vertex: return "vertex(" + id + ")";
        case ConstraintKind::Edge: return "edge(" + id + ")";
        case ConstraintKind::Src: return "src(" + id + "," + edge + ")";
        case ConstraintKind::Trg: return "trg(" + id + "," + edge + ")";
        case ConstraintKind::HasLabel: return "hasLabel(" + id + "," + name + ")";
        case ConstraintKind::HasKey: return "hasKey(" + id + "," + name + ")";
        case ConstraintKind::PropValue:
            return "propValue(" + id + "," + name + "," + std::string(predicate_symbol(op)) + "," +
                   operand_to_string(operand) + ")";
    }
    return {};
}

}  // namespace

Constraint::Constraint(ConstraintKind kind, std::string id, std::string edge, std::string name, Predicate op,
                       Operand operand)
    : kind_(kind), id_(std::move(id)), edge_(std::move(edge)), name_(std::move(name)), op_(op),
      operand_(std::move(operand)) {
    key_ = make_key(kind_, id_, edge_, name_, op_, operand_);
}

Constraint Constraint::vertex(std::string id) { return {ConstraintKind::Vertex, std::move(id), {}, {}, Predicate::EQ, Scalar{}}; }
Constraint Constraint::edge(std::string id) { return {ConstraintKind::Edge, std::move(id), {}, {}, Predicate::EQ, Scalar{}}; }
Constraint Constraint::src(std::string vertex, std::string edge) {
    return {ConstraintKind::Src, std::move(vertex), std::move(edge), {}, Predicate::EQ, Scalar{}};
}
Constraint Constraint::trg(std::string vertex, std::string edge) {
    return {ConstraintKind::Trg, std::move(vertex), std::move(edge), {}, Predicate::EQ, Scalar{}};
}
Constraint Constraint::has_label(std::string id, std::string label) {
    return {ConstraintKind::HasLabel, std::move(id), {}, std::move(label), Predicate::EQ, Scalar{}};
}
Constraint Constraint::has_key(std::string id, std::string key) {
    return {ConstraintKind::HasKey, std::move(id), {}, std::move(key), Predicate::EQ, Scalar{}};
}
Constraint Constraint::prop_value(std::string id, std::string key, Predicate op, Operand value) {
    return {ConstraintKind::PropValue, std::move(id), {}, std::move(key), op, std::move(value)};
}

std::vector<std::string> Constraint::ids() const {
    if (edge_.empty() || edge_ == id_) return {id_};
    return {id_, edge_};
}

std::set<std::string> ids_of(const ConstraintSet& cs) {
    std::set<std::string> out;
    for (const auto& c : cs) {
        out.insert(c.id());
        if (!c.edge_id().empty()) out.insert(c.edge_id());
    }
    return out;
}

std::string set_key(const ConstraintSet& cs) {
    std::string out = "{";
    bool first = true;
    for (const auto& c : cs) {
        if (!first) out += ", ";
        out += c.key();
        first = false;
    }
    return out + "}";
}

bool is_subset(const ConstraintSet& a, const ConstraintSet& b) {
    return a.size() <= b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string_view technique_name(Technique t) {
    static constexpr std::array<std::string_view, 11> names = {
        "exact", "synopsis", "charsets", "sysr", "sampling", "wanderjoin",
        "histogram", "mdhistogram", "sketch", "implication", "default"};
    return names[static_cast<std::size_t>(t)];
}

int trust_rank(Technique t) { return static_cast<int>(t); }

}  // namespace cardest
