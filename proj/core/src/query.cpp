#include "cardest/query.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cardest/errors.hpp"
#include "json_util.hpp"

namespace cardest {

using detail::json;

namespace {

std::vector<std::string> string_list(const json& j, const char* field) {
    std::vector<std::string> out;
    if (!j.contains(field)) return out;
    const auto& arr = j.at(field);
    if (!arr.is_array()) throw ParseError(std::string("'") + field + "' must be a list");
    for (const auto& x : arr) {
        if (!x.is_string()) throw ParseError(std::string("'") + field + "' entries must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::string required_string(const json& j, const char* field) {
    if (!j.is_object() || !j.contains(field) || !j.at(field).is_string())
        throw ParseError(std::string("missing string field '") + field + "'");
    return j.at(field).get<std::string>();
}

std::vector<PropConstraint> parse_props(const json& j, const std::string& id) {
    std::vector<PropConstraint> out;
    if (!j.contains("props")) return out;
    for (const auto& p : j.at("props")) {
        PropConstraint pc;
        pc.id = id;
        pc.key = required_string(p, "key");
        pc.op = parse_predicate(required_string(p, "op"));
        if (!p.contains("value")) throw ParseError("property constraint on '" + id + "' lacks a value");
        pc.value = detail::operand_from_json(p.at("value"));
        bool is_list = std::holds_alternative<std::vector<Scalar>>(pc.value);
        if (pc.op == Predicate::IN && !is_list) throw ParseError("IN takes a list value");
        if (pc.op != Predicate::IN && is_list) throw ParseError("only IN takes a list value");
        out.push_back(std::move(pc));
    }
    return out;
}

json props_to_json(const std::vector<PropConstraint>& props, const std::string& id) {
    json arr = json::array();
    for (const auto& p : props) {
        if (p.id != id) continue;
        arr.push_back({{"key", p.key}, {"op", std::string(predicate_symbol(p.op))}, {"value", detail::operand_to_json(p.value)}});
    }
    return arr;
}

void add_labels(ConstraintSet& cs, const QueryPattern& q, const std::string& id) {
    for (const auto& l : q.labels_of(id)) cs.insert(Constraint::has_label(id, l));
}

void add_keys(ConstraintSet& cs, const QueryPattern& q, const std::string& id) {
    for (const auto& p : q.props)
        if (p.id == id) cs.insert(Constraint::has_key(id, p.key));
}

struct Arm {
    std::string edge;
    std::string leaf;
};

void choose(const std::vector<Arm>& arms, std::size_t n, std::size_t start, std::vector<Arm>& cur,
            const std::function<void(const std::vector<Arm>&)>& emit) {
    if (cur.size() == n) {
        emit(cur);
        return;
    }
    for (std::size_t i = start; i < arms.size(); ++i) {
        bool dup = std::any_of(cur.begin(), cur.end(), [&](const Arm& a) { return a.leaf == arms[i].leaf; });
        if (dup) continue;
        cur.push_back(arms[i]);
        choose(arms, n, i + 1, cur, emit);
        cur.pop_back();
    }
}

// Incident arms at c: dir 0 = outgoing, 1 = incoming, 2 = both. Self loops are excluded.
std::vector<Arm> arms_at(const QueryPattern& q, const std::string& c, int dir) {
    std::vector<Arm> arms;
    for (const auto& e : q.edges) {
        if (e.src == e.trg) continue;
        if (dir != 1 && e.src == c) arms.push_back({e.id, e.trg});
        if (dir != 0 && e.trg == c) arms.push_back({e.id, e.src});
    }
    std::sort(arms.begin(), arms.end(), [](const Arm& a, const Arm& b) { return a.edge < b.edge; });
    return arms;
}

Subpattern star_subpattern(const QueryPattern& q, PatternClass kind, const std::string& center,
                           const std::vector<Arm>& arms) {
    Subpattern sp;
    sp.kind = kind;
    sp.center = center;
    for (const auto& a : arms) {
        sp.edges.push_back(a.edge);
        sp.vertices.push_back(a.leaf);
    }
    sp.constraints = topological_constraints(q, sp.edges);
    if (arms.empty()) sp.constraints.insert(Constraint::vertex(center));
    add_labels(sp.constraints, q, center);
    for (const auto& a : arms) {
        add_labels(sp.constraints, q, a.edge);
        add_labels(sp.constraints, q, a.leaf);
    }
    return sp;
}

void chains_from(const QueryPattern& q, std::size_t n, std::vector<std::string>& edges,
                 std::vector<std::string>& verts, std::vector<Subpattern>& out) {
    if (edges.size() == n) {
        Subpattern sp;
        sp.kind = PatternClass::Chain;
        sp.edges = edges;
        sp.vertices = verts;
        sp.constraints = topological_constraints(q, edges);
        for (const auto& e : edges) add_labels(sp.constraints, q, e);
        for (const auto& v : verts) add_labels(sp.constraints, q, v);
        out.push_back(std::move(sp));
        return;
    }
    for (const auto& e : q.edges) {
        if (e.src != verts.back()) continue;
        if (std::find(verts.begin(), verts.end(), e.trg) != verts.end()) continue;
        edges.push_back(e.id);
        verts.push_back(e.trg);
        chains_from(q, n, edges, verts, out);
        edges.pop_back();
        verts.pop_back();
    }
}

}  // namespace

bool QueryPattern::has_vertex(std::string_view id) const { return vertex(id) != nullptr; }
bool QueryPattern::has_edge(std::string_view id) const { return edge(id) != nullptr; }

const QueryVertex* QueryPattern::vertex(std::string_view id) const {
    for (const auto& v : vertices)
        if (v.id == id) return &v;
    return nullptr;
}

const QueryEdge* QueryPattern::edge(std::string_view id) const {
    for (const auto& e : edges)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<std::string> QueryPattern::labels_of(std::string_view id) const {
    if (auto* v = vertex(id)) return v->labels;
    if (auto* e = edge(id)) return e->labels;
    return {};
}

std::vector<std::string> QueryPattern::ids() const {
    std::vector<std::string> out;
    for (const auto& v : vertices) out.push_back(v.id);
    for (const auto& e : edges) out.push_back(e.id);
    return out;
}

void QueryPattern::validate() const {
    std::set<std::string> seen;
    for (const auto& id : ids()) {
        if (id.empty()) throw ParseError("empty query id");
        if (!seen.insert(id).second) throw ParseError("duplicate query id '" + id + "'");
    }
    for (const auto& e : edges) {
        if (!has_vertex(e.src)) throw ParseError("edge '" + e.id + "' has undeclared source '" + e.src + "'");
        if (!has_vertex(e.trg)) throw ParseError("edge '" + e.id + "' has undeclared target '" + e.trg + "'");
    }
    for (const auto& p : props)
        if (!seen.count(p.id)) throw ParseError("property constraint on unknown id '" + p.id + "'");
}

QueryDocument parse_query_document(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("query document: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("query document must be an object");
    QueryDocument doc;
    try {
        if (j.contains("id")) doc.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        auto& q = doc.pattern;
        for (const auto& v : j.value("vertices", json::array())) {
            QueryVertex qv{required_string(v, "id"), string_list(v, "labels")};
            auto props = parse_props(v, qv.id);
            q.props.insert(q.props.end(), props.begin(), props.end());
            q.vertices.push_back(std::move(qv));
        }
        for (const auto& e : j.value("edges", json::array())) {
            QueryEdge qe{required_string(e, "id"), required_string(e, "src"), required_string(e, "trg"),
                         string_list(e, "labels")};
            auto props = parse_props(e, qe.id);
            q.props.insert(q.props.end(), props.begin(), props.end());
            q.edges.push_back(std::move(qe));
        }
        q.validate();
        for (const auto& group : j.value("anyOf", json::array())) {
            if (!group.is_array() || group.empty()) throw ParseError("anyOf groups must be non-empty lists");
            std::vector<Alternative> alts;
            for (const auto& a : group) {
                Alternative alt{required_string(a, "id"), string_list(a, "labels"), {}};
                alt.props = parse_props(a, alt.id);
                auto known = q.ids();
                if (std::find(known.begin(), known.end(), alt.id) == known.end())
                    throw ParseError("anyOf alternative references unknown id '" + alt.id + "'");
                alts.push_back(std::move(alt));
            }
            doc.any_of.push_back(std::move(alts));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("query document: ") + e.what());
    }
    return doc;
}

QueryPattern parse_query(std::string_view text) { return parse_query_document(text).pattern; }

QueryDocument load_query_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open query file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_query_document(ss.str());
}

std::string query_to_json(const QueryDocument& doc) {
    const auto& q = doc.pattern;
    json j = json::object();
    if (!doc.id.empty()) j["id"] = doc.id;
    json vs = json::array();
    for (const auto& v : q.vertices) vs.push_back({{"id", v.id}, {"labels", v.labels}, {"props", props_to_json(q.props, v.id)}});
    json es = json::array();
    for (const auto& e : q.edges)
        es.push_back({{"id", e.id}, {"src", e.src}, {"trg", e.trg}, {"labels", e.labels}, {"props", props_to_json(q.props, e.id)}});
    j["vertices"] = vs;
    j["edges"] = es;
    if (!doc.any_of.empty()) {
        json groups = json::array();
        for (const auto& g : doc.any_of) {
            json alts = json::array();
            for (const auto& a : g) alts.push_back({{"id", a.id}, {"labels", a.labels}, {"props", props_to_json(a.props, a.id)}});
            groups.push_back(alts);
        }
        j["anyOf"] = groups;
    }
    return j.dump();
}

std::string query_to_json(const QueryPattern& q) { return query_to_json(QueryDocument{{}, q, {}}); }

ConstraintSet extract_constraints(const QueryPattern& q) {
    ConstraintSet out;
    for (const auto& v : q.vertices) {
        out.insert(Constraint::vertex(v.id));
        for (const auto& l : v.labels) out.insert(Constraint::has_label(v.id, l));
    }
    for (const auto& e : q.edges) {
        out.insert(Constraint::edge(e.id));
        out.insert(Constraint::src(e.src, e.id));
        out.insert(Constraint::trg(e.trg, e.id));
        for (const auto& l : e.labels) out.insert(Constraint::has_label(e.id, l));
    }
    for (const auto& p : q.props) {
        out.insert(Constraint::has_key(p.id, p.key));
        out.insert(Constraint::prop_value(p.id, p.key, p.op, p.value));
    }
    return out;
}

ConstraintSet implied_closure(const ConstraintSet& s, const QueryPattern&) {
    ConstraintSet out = s;
    for (const auto& c : s) {
        switch (c.kind()) {
            case ConstraintKind::Src:
            case ConstraintKind::Trg:
                out.insert(Constraint::vertex(c.id()));
                out.insert(Constraint::edge(c.edge_id()));
                break;
            case ConstraintKind::PropValue: out.insert(Constraint::has_key(c.id(), c.name())); break;
            default: break;
        }
    }
    return out;
}

ConstraintSet topological_constraints(const QueryPattern& q, const std::vector<std::string>& edges) {
    ConstraintSet out;
    for (const auto& id : edges) {
        const auto* e = q.edge(id);
        if (!e) continue;
        out.insert(Constraint::edge(e->id));
        out.insert(Constraint::vertex(e->src));
        out.insert(Constraint::vertex(e->trg));
        out.insert(Constraint::src(e->src, e->id));
        out.insert(Constraint::trg(e->trg, e->id));
    }
    return out;
}

std::vector<Subpattern> enumerate_subpatterns(const QueryPattern& q, SubpatternClass cls) {
    std::vector<Subpattern> out;
    const auto n = static_cast<std::size_t>(std::max(cls.size, 1));
    switch (cls.kind) {
        case PatternClass::Edge:
            for (const auto& e : q.edges) {
                if (e.src == e.trg) continue;
                Subpattern sp;
                sp.kind = PatternClass::Edge;
                sp.edges = {e.id};
                sp.vertices = {e.src, e.trg};
                sp.constraints = topological_constraints(q, sp.edges);
                for (const auto& id : {e.src, e.id, e.trg}) add_labels(sp.constraints, q, id);
                out.push_back(std::move(sp));
            }
            break;
        case PatternClass::Chain:
            for (const auto& e : q.edges) {
                if (e.src == e.trg) continue;
                std::vector<std::string> edges{e.id};
                std::vector<std::string> verts{e.src, e.trg};
                chains_from(q, n, edges, verts, out);
            }
            break;
        case PatternClass::SourceStar:
        case PatternClass::TargetStar:
        case PatternClass::Star: {
            int dir = cls.kind == PatternClass::SourceStar ? 0 : cls.kind == PatternClass::TargetStar ? 1 : 2;
            for (const auto& v : q.vertices) {
                auto arms = arms_at(q, v.id, dir);
                std::vector<Arm> cur;
                choose(arms, n, 0, cur, [&](const std::vector<Arm>& pick) {
                    out.push_back(star_subpattern(q, cls.kind, v.id, pick));
                });
            }
            break;
        }
        case PatternClass::CsPattern:
        case PatternClass::TargetCsPattern: {
            int dir = cls.kind == PatternClass::CsPattern ? 0 : 1;
            constexpr std::size_t kMaxArms = 6;
            for (const auto& v : q.vertices) {
                auto arms = arms_at(q, v.id, dir);
                ConstraintSet keys;
                add_keys(keys, q, v.id);
                for (std::size_t k = keys.empty() ? 1 : 0; k <= std::min(arms.size(), kMaxArms); ++k) {
                    std::vector<Arm> cur;
                    choose(arms, k, 0, cur, [&](const std::vector<Arm>& pick) {
                        auto sp = star_subpattern(q, cls.kind, v.id, pick);
                        sp.constraints.insert(keys.begin(), keys.end());
                        out.push_back(std::move(sp));
                    });
                }
            }
            break;
        }
        case PatternClass::PerId: {
            auto all = extract_constraints(q);
            for (const auto& id : q.ids()) {
                Subpattern sp;
                sp.kind = PatternClass::PerId;
                sp.center = id;
                for (const auto& c : all)
                    if (c.is_data() && c.id() == id) sp.constraints.insert(c);
                out.push_back(std::move(sp));
            }
            break;
        }
        case PatternClass::PerEdgePattern: {
            auto all = extract_constraints(q);
            for (const auto& e : q.edges) {
                Subpattern sp;
                sp.kind = PatternClass::PerEdgePattern;
                sp.center = e.id;
                sp.edges = {e.id};
                sp.vertices = {e.src, e.trg};
                std::set<std::string> scope{e.src, e.id, e.trg};
                for (const auto& c : all) {
                    auto ids = c.ids();
                    if (std::all_of(ids.begin(), ids.end(), [&](const std::string& i) { return scope.count(i) > 0; }))
                        sp.constraints.insert(c);
                }
                out.push_back(std::move(sp));
            }
            break;
        }
    }
    return out;
}

}  // namespace cardest
