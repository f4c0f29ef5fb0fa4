#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cardest/pets.hpp"

namespace cardest::fixtures {

namespace {

std::size_t below(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool check(const Constraint& c, const std::map<std::string, ElementId>& m, const PropertyGraph& g,
           const std::vector<ElementRecord>& recs) {
    const ElementId x = m.at(c.id());
    const auto& r = recs[x];
    switch (c.kind()) {
        case ConstraintKind::Vertex: return x < g.num_vertices();
        case ConstraintKind::Edge: return x >= g.num_vertices();
        case ConstraintKind::Src:
        case ConstraintKind::Trg: {
            const ElementId e = m.at(c.edge_id());
            if (e < g.num_vertices() || x >= g.num_vertices()) return false;
            const auto& er = recs[e];
            return (c.kind() == ConstraintKind::Src ? er.src : er.trg) == r.id;
        }
        case ConstraintKind::HasLabel: return std::find(r.labels.begin(), r.labels.end(), c.name()) != r.labels.end();
        case ConstraintKind::HasKey: return r.props.count(c.name()) > 0;
        case ConstraintKind::PropValue: {
            auto it = r.props.find(c.name());
            return it != r.props.end() && eval_predicate(it->second, c.op(), c.operand());
        }
    }
    return false;
}

}  // namespace

PropertyGraph make_g4() {
    PropertyGraph::Builder b;
    b.add_vertex({"g1", {}, {}, "", ""});
    b.add_vertex({"g3", {}, {}, "", ""});
    b.add_edge({"g2", {}, {}, "g1", "g3"});
    b.add_edge({"g4", {}, {}, "g3", "g1"});
    return std::move(b).build();
}

QueryPattern g4_query() {
    QueryPattern q;
    q.vertices = {{"q1", {}}, {"q3", {}}};
    q.edges = {{"q2", "q1", "q3", {}}};
    return q;
}

QueryDocument job18a_document() {
    return load_query_document(std::string(CARDEST_TEST_DATA) + "/job18a.json");
}

PropertyGraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec) {
    PropertyGraph::Builder b;
    const std::size_t nv = 1 + below(rng, spec.max_vertices);
    const std::size_t ne = below(rng, spec.max_edges + 1);
    auto labels = [&](const std::string& prefix, std::size_t n) {
        std::vector<std::string> ls;
        std::size_t k = below(rng, spec.multi_labels ? 3 : 2);
        for (std::size_t i = 0; i < k; ++i) {
            auto l = prefix + std::to_string(below(rng, n));
            if (std::find(ls.begin(), ls.end(), l) == ls.end()) ls.push_back(l);
        }
        return ls;
    };
    auto props = [&]() {
        std::map<std::string, Scalar> p;
        if (below(rng, 3) != 0) p["a"] = static_cast<std::int64_t>(below(rng, spec.values));
        if (below(rng, 2) != 0) p["b"] = static_cast<std::int64_t>(below(rng, spec.values));
        if (below(rng, 4) == 0) p["s"] = std::string(1, static_cast<char>('x' + below(rng, 3)));
        return p;
    };
    for (std::size_t i = 0; i < nv; ++i) b.add_vertex({"v" + std::to_string(i), labels("L", spec.vertex_labels), props(), "", ""});
    for (std::size_t i = 0; i < ne; ++i)
        b.add_edge({"e" + std::to_string(i), labels("R", spec.edge_labels), props(), "v" + std::to_string(below(rng, nv)),
                    "v" + std::to_string(below(rng, nv))});
    return std::move(b).build();
}

QueryPattern random_query(std::mt19937_64& rng, const PropertyGraph& g, std::size_t max_edges, bool with_props) {
    QueryPattern q;
    const std::size_t ne = 1 + below(rng, max_edges);
    q.vertices.push_back({"u0", {}});
    for (std::size_t i = 0; i < ne; ++i) {
        const std::string anchor = q.vertices[below(rng, q.vertices.size())].id;
        std::string other;
        if (below(rng, 3) == 0) {
            other = q.vertices[below(rng, q.vertices.size())].id;
        } else {
            other = "u" + std::to_string(q.vertices.size());
            q.vertices.push_back({other, {}});
        }
        if (below(rng, 2)) q.edges.push_back({"f" + std::to_string(i), anchor, other, {}});
        else q.edges.push_back({"f" + std::to_string(i), other, anchor, {}});
    }
    auto maybe_label = [&](std::vector<std::string>& ls, const std::string& prefix) {
        if (below(rng, 2) == 0) return;
        std::vector<std::string> pool;
        for (std::size_t l = 0; l < g.num_labels(); ++l)
            if (g.label_name(static_cast<LabelId>(l)).rfind(prefix, 0) == 0) pool.push_back(g.label_name(static_cast<LabelId>(l)));
        if (pool.empty()) pool.push_back(prefix + "9");
        ls.push_back(pool[below(rng, pool.size())]);
    };
    for (auto& v : q.vertices) maybe_label(v.labels, "L");
    for (auto& e : q.edges) maybe_label(e.labels, "R");
    if (with_props) {
        for (const auto& id : q.ids()) {
            if (below(rng, 3) != 0) continue;
            static const Predicate ops[] = {Predicate::EQ, Predicate::NEQ, Predicate::LT, Predicate::GEQ};
            q.props.push_back({id, below(rng, 2) ? "a" : "b", ops[below(rng, 4)], Operand{Scalar{static_cast<std::int64_t>(below(rng, 3))}}});
        }
    }
    return q;
}

std::uint64_t oracle_count(const PropertyGraph& g, const ConstraintSet& cs) {
    std::vector<ElementRecord> recs;
    for (std::size_t i = 0; i < g.num_ids(); ++i) recs.push_back(g.record(static_cast<ElementId>(i)));
    // Order: endpoints next to their edges so topology prunes early.
    std::vector<std::string> order;
    auto add = [&](const std::string& id) {
        if (std::find(order.begin(), order.end(), id) == order.end()) order.push_back(id);
    };
    for (const auto& c : cs)
        if (c.kind() == ConstraintKind::Src || c.kind() == ConstraintKind::Trg) {
            add(c.edge_id());
            add(c.id());
        }
    for (const auto& id : ids_of(cs)) add(id);
    std::vector<std::vector<const Constraint*>> ready(order.size());
    for (const auto& c : cs) {
        std::size_t last = 0;
        for (const auto& id : c.ids()) last = std::max<std::size_t>(last, std::find(order.begin(), order.end(), id) - order.begin());
        ready[last].push_back(&c);
    }
    std::map<std::string, ElementId> m;
    std::uint64_t count = 0;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == order.size()) {
            ++count;
            return;
        }
        for (std::size_t x = 0; x < g.num_ids(); ++x) {
            m[order[i]] = static_cast<ElementId>(x);
            bool ok = std::all_of(ready[i].begin(), ready[i].end(), [&](const Constraint* c) { return check(*c, m, g, recs); });
            if (ok) self(self, i + 1);
        }
        m.erase(order[i]);
    };
    rec(rec, 0);
    return count;
}

double oracle_selectivity(const PropertyGraph& g, const ConstraintSet& cs) {
    const auto k = ids_of(cs).size();
    if (g.num_ids() == 0) return 0.0;
    return static_cast<double>(oracle_count(g, cs)) / std::pow(static_cast<double>(g.num_ids()), static_cast<double>(k));
}

StatisticsCatalog full_catalog(const PropertyGraph& g, int synopsis_size) {
    StatsConfig cfg;
    cfg.synopses = {{SynopsisClass::Edge, 1},
                    {SynopsisClass::Chain, synopsis_size},
                    {SynopsisClass::SourceStar, synopsis_size},
                    {SynopsisClass::TargetStar, synopsis_size}};
    cfg.cs_max_entries = 100000;
    cfg.cs_in = true;
    cfg.sketch_buckets = 4;
    cfg.samples = {{SamplePattern::Id, 1.0}, {SamplePattern::EdgePattern, 1.0}};
    return build_catalog(g, cfg);
}

PES exact_singletons(const PropertyGraph& g, const QueryPattern& q) {
    PES out;
    for (const auto& c : extract_constraints(q)) out.push_back({{c}, oracle_selectivity(g, {c}), Technique::Exact, "oracle"});
    return out;
}

}  // namespace cardest::fixtures
