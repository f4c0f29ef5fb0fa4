#include "cardest/epests.hpp"

#include <algorithm>

#include "cardest/errors.hpp"
#include "cardest/pets.hpp"

namespace cardest {

namespace {

bool in_class(const Constraint& c, IpClass cls) {
    switch (cls) {
        case IpClass::PropValue: return c.kind() == ConstraintKind::PropValue;
        case IpClass::Prop: return c.kind() == ConstraintKind::PropValue || c.kind() == ConstraintKind::HasKey;
        case IpClass::All: return true;
    }
    return false;
}

std::string ip_tag(IpPattern p, IpClass c) {
    std::string tag = p == IpPattern::Id ? "IP(id," : "IP(ep,";
    tag += c == IpClass::PropValue ? "pv)" : c == IpClass::Prop ? "p)" : "a)";
    return tag;
}

}  // namespace

EpestSpec parse_epest_tag(std::string_view tag) {
    EpestSpec s;
    s.tag = std::string(tag);
    if (tag == "impl") {
        s.deterministic = true;
        return s;
    }
    if (tag.rfind("IP(", 0) != 0 || tag.back() != ')') throw ConfigError("unknown EPEST tag '" + std::string(tag) + "'");
    auto args = split_tags(tag.substr(3, tag.size() - 4));
    if (args.size() != 2) throw ConfigError("IP takes (pattern, class): '" + std::string(tag) + "'");
    if (args[0] == "id") s.pattern = IpPattern::Id;
    else if (args[0] == "ep") s.pattern = IpPattern::EdgePattern;
    else throw ConfigError("IP pattern must be id or ep, got '" + args[0] + "'");
    if (args[1] == "pv") s.cls = IpClass::PropValue;
    else if (args[1] == "p") s.cls = IpClass::Prop;
    else if (args[1] == "a") s.cls = IpClass::All;
    else throw ConfigError("IP class must be pv, p or a, got '" + args[1] + "'");
    s.tag = ip_tag(s.pattern, s.cls);
    return s;
}

std::vector<EpestSpec> parse_epest_list(std::string_view text) {
    std::vector<EpestSpec> out;
    for (const auto& t : split_tags(text))
        if (t != "{}") out.push_back(parse_epest_tag(t));
    return out;
}

PES epest_deterministic(const PES& pes, const QueryPattern& q) {
    PES out;
    for (const auto& pe : pes) {
        auto closed = implied_closure(pe.constraints, q);
        if (closed.size() == pe.constraints.size()) continue;
        PartialEstimate copy = pe;
        copy.constraints = std::move(closed);
        copy.technique = Technique::Implication;
        copy.tag = "impl<" + pe.tag + ">";
        out.push_back(std::move(copy));
    }
    return out;
}

PES epest_ip(const PES& pes, const QueryPattern& q, IpPattern pattern, IpClass cls) {
    std::vector<std::set<std::string>> scopes;
    if (pattern == IpPattern::Id) {
        for (const auto& id : q.ids()) scopes.push_back({id});
    } else {
        for (const auto& e : q.edges) scopes.push_back({e.src, e.id, e.trg});
    }
    PES out;
    const auto tag = ip_tag(pattern, cls);
    for (const auto& scope : scopes) {
        std::vector<const PartialEstimate*> group;
        for (const auto& pe : pes) {
            bool ok = !pe.constraints.empty();
            for (const auto& c : pe.constraints) {
                auto ids = c.ids();
                ok = ok && in_class(c, cls) &&
                     std::all_of(ids.begin(), ids.end(), [&](const std::string& i) { return scope.count(i) > 0; });
            }
            if (ok) group.push_back(&pe);
        }
        if (group.size() < 2) continue;
        const PartialEstimate* best = group.front();
        ConstraintSet all;
        for (const auto* pe : group) {
            all.insert(pe->constraints.begin(), pe->constraints.end());
            if (pe->selectivity < best->selectivity ||
                (pe->selectivity == best->selectivity &&
                 (pe->constraints.size() > best->constraints.size() ||
                  (pe->constraints.size() == best->constraints.size() && set_key(pe->constraints) < set_key(best->constraints)))))
                best = pe;
        }
        if (std::any_of(group.begin(), group.end(), [&](const PartialEstimate* pe) { return pe->constraints == all; }) &&
            best->constraints == all)
            continue;
        out.push_back({std::move(all), best->selectivity, Technique::Implication, tag + "<" + set_key(best->constraints) + ">",
                       best->low_confidence});
    }
    return out;
}

PES apply_epests(const PES& pes, const QueryPattern& q, const std::vector<EpestSpec>& specs) {
    PES out = pes;
    for (const auto& s : specs) {
        auto add = s.deterministic ? epest_deterministic(pes, q) : epest_ip(pes, q, s.pattern, s.cls);
        out.insert(out.end(), add.begin(), add.end());
    }
    return out;
}

}  // namespace cardest
