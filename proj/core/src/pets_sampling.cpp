#include <algorithm>
#include <cmath>
#include <random>

#include "cardest/matcher.hpp"
#include "cardest/pets.hpp"

namespace cardest {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace

std::vector<std::string> wander_join_plan(const QueryPattern& q) {
    std::vector<std::string> order;
    if (q.edges.empty()) return order;
    std::vector<const QueryEdge*> rest;
    for (const auto& e : q.edges) rest.push_back(&e);
    std::sort(rest.begin(), rest.end(), [](const QueryEdge* a, const QueryEdge* b) { return a->id < b->id; });
    std::set<std::string> seen;
    while (!rest.empty()) {
        auto it = order.empty() ? rest.begin() : std::find_if(rest.begin(), rest.end(), [&](const QueryEdge* e) {
            return seen.count(e->src) || seen.count(e->trg);
        });
        if (it == rest.end()) return {};
        order.push_back((*it)->id);
        seen.insert((*it)->src);
        seen.insert((*it)->trg);
        rest.erase(it);
    }
    if (seen.size() != q.vertices.size()) return {};
    return order;
}

std::optional<PartialEstimate> pet_wander_join(const QueryPattern& q, const PropertyGraph& g, std::uint64_t walks,
                                               std::uint64_t seed) {
    auto plan = wander_join_plan(q);
    if (plan.empty() || walks == 0) return std::nullopt;
    const auto all = extract_constraints(q);
    std::map<std::string, std::vector<Constraint>> data;
    for (const auto& c : all)
        if (c.is_data()) data[c.id()].push_back(c);
    std::map<std::string, std::optional<LabelId>> first_label;
    for (const auto& e : q.edges) {
        first_label[e.id] = std::nullopt;
        if (!e.labels.empty()) first_label[e.id] = g.label_id(e.labels.front()).value_or(kNoElement);
    }

    std::vector<ElementId> every_edge;
    std::mt19937_64 rng(seed);
    double total = 0;
    std::uint64_t hits = 0;
    for (std::uint64_t w = 0; w < walks; ++w) {
        Mapping m;
        double prob = 1.0;
        bool ok = true;
        auto bind = [&](const std::string& id, ElementId x) {
            auto [it, fresh] = m.emplace(id, x);
            if (!fresh) return it->second == x;
            auto d = data.find(id);
            if (d == data.end()) return true;
            return std::all_of(d->second.begin(), d->second.end(), [&](const Constraint& c) { return check_constraint(g, m, c); });
        };
        for (std::size_t i = 0; ok && i < plan.size(); ++i) {
            const auto* qe = q.edge(plan[i]);
            auto lab = first_label[qe->id];
            if (lab && *lab == kNoElement) {
                ok = false;
                break;
            }
            std::span<const ElementId> cands;
            bool forward = true;
            if (i == 0) {
                if (lab) {
                    cands = g.edges_with_label(*lab);
                } else {
                    if (every_edge.empty())
                        for (std::size_t e = g.num_vertices(); e < g.num_ids(); ++e) every_edge.push_back(static_cast<ElementId>(e));
                    cands = every_edge;
                }
            } else if (m.count(qe->src)) {
                auto v = m.at(qe->src);
                cands = lab ? g.out_edges(v, *lab) : g.out_edges(v);
            } else {
                forward = false;
                auto v = m.at(qe->trg);
                cands = lab ? g.in_edges(v, *lab) : g.in_edges(v);
            }
            if (cands.empty()) {
                ok = false;
                break;
            }
            ElementId e = cands[pick(rng, cands.size())];
            prob /= static_cast<double>(cands.size());
            ok = forward ? bind(qe->src, g.source(e)) && bind(qe->trg, g.target(e))
                         : bind(qe->trg, g.target(e)) && bind(qe->src, g.source(e));
            ok = ok && bind(qe->id, e);
        }
        if (!ok) continue;
        ++hits;
        total += 1.0 / prob;
    }
    PartialEstimate pe;
    pe.constraints = all;
    pe.technique = Technique::WanderJoin;
    pe.tag = "WJ(" + std::to_string(walks) + ")";
    pe.selectivity = to_selectivity(total / static_cast<double>(walks), q.size(), g.num_ids());
    pe.low_confidence = hits == 0;
    return pe;
}

}  // namespace cardest
