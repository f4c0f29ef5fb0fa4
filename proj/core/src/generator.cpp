#include <algorithm>
#include <cmath>
#include <random>

#include "cardest/bench.hpp"
#include "cardest/errors.hpp"

namespace cardest {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t below(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

class Zipf {
public:
    Zipf(std::size_t n, double s) : cdf_(n) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) cdf_[i] = acc += 1.0 / std::pow(static_cast<double>(i + 1), s);
        for (auto& c : cdf_) c /= acc;
    }
    std::size_t operator()(std::mt19937_64& rng) const {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), unit(rng));
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

}  // namespace

PropertyGraph generate_graph(const GeneratorSpec& spec) {
    if (spec.vertex_labels == 0 || spec.edge_labels == 0 || spec.n_values == 0)
        throw ConfigError("generator needs at least one label and one value");
    if (spec.n_vertices == 0 && spec.n_edges > 0) throw ConfigError("generator cannot place edges without vertices");
    if (spec.correlation < 0 || spec.correlation > 1) throw ConfigError("correlation must be within [0, 1]");
    std::mt19937_64 rng(spec.seed);
    PropertyGraph::Builder b;
    std::vector<std::size_t> vlabel(spec.n_vertices);
    for (std::size_t i = 0; i < spec.n_vertices; ++i) {
        ElementRecord r;
        r.id = "v" + std::to_string(i);
        vlabel[i] = below(rng, spec.vertex_labels);
        r.labels = {"L" + std::to_string(vlabel[i])};
        std::size_t attr = unit(rng) < spec.correlation ? vlabel[i] % spec.n_values : below(rng, spec.n_values);
        r.props["attr"] = static_cast<std::int64_t>(attr);
        r.props["score"] = static_cast<double>(below(rng, 1000)) / 10.0;
        if (unit(rng) < 0.5) r.props["name"] = std::string("n") + std::to_string(below(rng, 50));
        b.add_vertex(std::move(r));
    }
    Zipf pick(std::max<std::size_t>(spec.n_vertices, 1), spec.degree_skew);
    // Shuffle so that high-degree vertices are not always the low ids.
    std::vector<std::size_t> perm(spec.n_vertices);
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[below(rng, i)]);
    for (std::size_t i = 0; i < spec.n_edges; ++i) {
        ElementRecord r;
        r.id = "e" + std::to_string(i);
        auto s = perm[pick(rng)], t = perm[pick(rng)];
        r.src = "v" + std::to_string(s);
        r.trg = "v" + std::to_string(t);
        std::size_t l = unit(rng) < spec.correlation ? vlabel[s] % spec.edge_labels : below(rng, spec.edge_labels);
        r.labels = {"R" + std::to_string(l)};
        r.props["w"] = static_cast<std::int64_t>(below(rng, 10));
        b.add_edge(std::move(r));
    }
    return std::move(b).build();
}

std::vector<QueryDocument> generate_workload(const PropertyGraph& g, std::size_t n_queries, std::size_t max_edges,
                                             bool with_props, std::uint64_t seed) {
    std::vector<QueryDocument> out;
    if (g.num_edges() == 0 || max_edges == 0) return out;
    std::mt19937_64 rng(seed);
    for (std::size_t qi = 0; qi < n_queries; ++qi) {
        const std::size_t target = 1 + below(rng, max_edges);
        std::vector<ElementId> edges{static_cast<ElementId>(g.num_vertices() + below(rng, g.num_edges()))};
        std::vector<ElementId> verts{g.source(edges[0]), g.target(edges[0])};
        if (verts[0] == verts[1]) verts.pop_back();
        for (int tries = 0; edges.size() < target && tries < 20; ++tries) {
            auto v = verts[below(rng, verts.size())];
            auto outs = g.out_edges(v);
            auto ins = g.in_edges(v);
            if (outs.empty() && ins.empty()) continue;
            std::size_t k = below(rng, outs.size() + ins.size());
            ElementId e = k < outs.size() ? outs[k] : ins[k - outs.size()];
            if (std::find(edges.begin(), edges.end(), e) != edges.end()) continue;
            edges.push_back(e);
            for (auto x : {g.source(e), g.target(e)})
                if (std::find(verts.begin(), verts.end(), x) == verts.end()) verts.push_back(x);
        }
        QueryDocument doc;
        doc.id = "q" + std::to_string(qi);
        auto qid = [&](ElementId x) {
            if (g.is_edge(x))
                return "e" + std::to_string(std::find(edges.begin(), edges.end(), x) - edges.begin());
            return "v" + std::to_string(std::find(verts.begin(), verts.end(), x) - verts.begin());
        };
        auto labels = [&](ElementId x) {
            std::vector<std::string> ls;
            for (auto l : g.labels(x))
                if (unit(rng) < 0.75) ls.push_back(g.label_name(l));
            return ls;
        };
        for (auto v : verts) {
            doc.pattern.vertices.push_back({qid(v), labels(v)});
            if (!with_props || unit(rng) >= 0.4) continue;
            auto props = g.properties(v);
            if (props.empty()) continue;
            const auto& [k, val] = props[below(rng, props.size())];
            doc.pattern.props.push_back({qid(v), g.key_name(k), Predicate::EQ, Operand{val}});
        }
        for (auto e : edges) doc.pattern.edges.push_back({qid(e), qid(g.source(e)), qid(g.target(e)), labels(e)});
        out.push_back(std::move(doc));
    }
    return out;
}

}  // namespace cardest
