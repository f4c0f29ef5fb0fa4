#include <algorithm>
#include <unordered_map>

#include "cardest/errors.hpp"
#include "cardest/stats.hpp"

namespace cardest {

namespace {

std::string esc(const std::string& label) {
    if (label == kWildcard) return label;
    std::string out;
    for (char c : label) {
        if (c == '|' || c == ':' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

// Every single label of x plus the wildcard.
std::vector<std::string> choices(const PropertyGraph& g, ElementId x) {
    std::vector<std::string> out{kWildcard};
    for (auto l : g.labels(x)) out.push_back(esc(g.label_name(l)));
    return out;
}

using Counts = std::map<std::string, std::uint64_t>;

void count_edges(const PropertyGraph& g, Counts& counts) {
    for (auto e = static_cast<ElementId>(g.num_vertices()); e < g.num_ids(); ++e)
        for (const auto& ls : choices(g, g.source(e)))
            for (const auto& le : choices(g, e))
                for (const auto& lt : choices(g, g.target(e))) ++counts["edge|1|" + ls + "|" + le + "|" + lt];
}

void count_chains(const PropertyGraph& g, int max_size, Counts& counts) {
    const std::size_t nv = g.num_vertices();
    std::vector<std::unordered_map<std::string, std::uint64_t>> layer(nv), next(nv);
    for (ElementId v = 0; v < nv; ++v)
        for (const auto& l : choices(g, v)) layer[v][l] += 1;
    for (int k = 1; k <= max_size; ++k) {
        for (auto& m : next) m.clear();
        for (ElementId v = 0; v < nv; ++v) {
            if (layer[v].empty()) continue;
            for (auto e : g.out_edges(v)) {
                auto w = g.target(e);
                auto ce = choices(g, e);
                auto cw = choices(g, w);
                for (const auto& [prefix, c] : layer[v])
                    for (const auto& le : ce)
                        for (const auto& lw : cw) next[w][prefix + "|" + le + "|" + lw] += c;
            }
        }
        std::swap(layer, next);
        const std::string head = "chain|" + std::to_string(k) + "|";
        for (const auto& m : layer)
            for (const auto& [seq, c] : m) counts[head + seq] += c;
    }
}

void count_stars(const PropertyGraph& g, SynopsisClass cls, int max_size, Counts& counts) {
    const bool out = cls == SynopsisClass::SourceStar;
    const std::string name(synopsis_class_name(cls));
    for (ElementId v = 0; v < g.num_vertices(); ++v) {
        std::map<std::string, std::uint64_t> f;
        for (auto e : out ? g.out_edges(v) : g.in_edges(v)) {
            auto leaf = out ? g.target(e) : g.source(e);
            auto cl = choices(g, leaf);
            for (const auto& le : choices(g, e))
                for (const auto& ll : cl) ++f[le + ":" + ll];
        }
        if (f.empty()) continue;
        std::vector<std::pair<std::string, std::uint64_t>> arms(f.begin(), f.end());
        for (const auto& lc : choices(g, v)) {
            for (int k = 1; k <= max_size; ++k) {
                const std::string head = name + "|" + std::to_string(k) + "|" + lc;
                std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
                while (true) {
                    std::uint64_t prod = 1;
                    std::string key = head;
                    for (auto i : idx) {
                        prod *= arms[i].second;
                        key += "|" + arms[i].first;
                    }
                    counts[key] += prod;
                    // next non-decreasing index tuple
                    int p = k - 1;
                    while (p >= 0 && idx[static_cast<std::size_t>(p)] == arms.size() - 1) --p;
                    if (p < 0) break;
                    auto base = ++idx[static_cast<std::size_t>(p)];
                    for (auto q = static_cast<std::size_t>(p) + 1; q < idx.size(); ++q) idx[q] = base;
                }
            }
        }
    }
}

}  // namespace

std::string_view synopsis_class_name(SynopsisClass c) {
    switch (c) {
        case SynopsisClass::Edge: return "edge";
        case SynopsisClass::Chain: return "chain";
        case SynopsisClass::SourceStar: return "sstar";
        case SynopsisClass::TargetStar: return "tstar";
    }
    return "";
}

std::string chain_key(SynopsisClass cls, const std::vector<std::string>& vertex_labels,
                      const std::vector<std::string>& edge_labels) {
    std::string key = std::string(synopsis_class_name(cls)) + "|" + std::to_string(edge_labels.size()) + "|" +
                      esc(vertex_labels.at(0));
    for (std::size_t i = 0; i < edge_labels.size(); ++i) key += "|" + esc(edge_labels[i]) + "|" + esc(vertex_labels.at(i + 1));
    return key;
}

std::string star_key(SynopsisClass cls, const std::string& center_label,
                     std::vector<std::pair<std::string, std::string>> arms) {
    std::vector<std::string> parts;
    for (const auto& [e, l] : arms) parts.push_back(esc(e) + ":" + esc(l));
    std::sort(parts.begin(), parts.end());
    std::string key = std::string(synopsis_class_name(cls)) + "|" + std::to_string(arms.size()) + "|" + esc(center_label);
    for (const auto& p : parts) key += "|" + p;
    return key;
}

std::string edge_pattern_key(const std::string& src, const std::string& edge, const std::string& trg) {
    return esc(src) + "|" + esc(edge) + "|" + esc(trg);
}

LabeledTopoSynopsis build_labeled_synopsis(const PropertyGraph& g, SynopsisClass cls, int max_size) {
    if (max_size < 1) throw ConfigError("synopsis max_size must be >= 1");
    if (max_size > 4) throw ResourceError("synopsis max_size > 4 is not supported");
    LabeledTopoSynopsis s;
    s.cls = cls;
    s.max_size = cls == SynopsisClass::Edge ? 1 : max_size;
    switch (cls) {
        case SynopsisClass::Edge: count_edges(g, s.counts); break;
        case SynopsisClass::Chain: count_chains(g, max_size, s.counts); break;
        default: count_stars(g, cls, max_size, s.counts); break;
    }
    return s;
}

SysRStats build_sysr(const PropertyGraph& g) {
    struct Acc {
        std::uint64_t n = 0;
        std::vector<ElementId> srcs, trgs;
    };
    std::map<std::string, Acc> acc;
    for (auto e = static_cast<ElementId>(g.num_vertices()); e < g.num_ids(); ++e) {
        for (const auto& ls : choices(g, g.source(e)))
            for (const auto& le : choices(g, e))
                for (const auto& lt : choices(g, g.target(e))) {
                    auto& a = acc[ls + "|" + le + "|" + lt];
                    ++a.n;
                    a.srcs.push_back(g.source(e));
                    a.trgs.push_back(g.target(e));
                }
    }
    SysRStats out;
    for (auto& [key, a] : acc) {
        auto distinct = [](std::vector<ElementId>& v) {
            std::sort(v.begin(), v.end());
            return static_cast<std::uint64_t>(std::unique(v.begin(), v.end()) - v.begin());
        };
        out.entries[key] = {a.n, distinct(a.srcs), distinct(a.trgs)};
    }
    return out;
}

std::uint32_t sketch_bucket(ElementId vertex, std::uint32_t n_buckets, std::uint64_t seed) {
    std::uint64_t h = (static_cast<std::uint64_t>(vertex) + 1) ^ seed;
    h *= 0x9E3779B97F4A7C15ULL;
    h ^= h >> 29;
    return static_cast<std::uint32_t>((h >> 16) % n_buckets);
}

BoundSketch build_bound_sketch(const PropertyGraph& g, std::uint32_t n_buckets, std::uint64_t seed) {
    if (n_buckets < 1) throw ConfigError("bound sketch needs at least one bucket");
    BoundSketch s;
    s.n_buckets = n_buckets;
    s.seed = seed;
    std::map<std::string, std::array<std::map<ElementId, std::uint64_t>, 2>> degree;
    for (auto e = static_cast<ElementId>(g.num_vertices()); e < g.num_ids(); ++e) {
        for (const auto& ls : choices(g, g.source(e)))
            for (const auto& le : choices(g, e))
                for (const auto& lt : choices(g, g.target(e))) {
                    auto& d = degree[ls + "|" + le + "|" + lt];
                    ++d[0][g.source(e)];
                    ++d[1][g.target(e)];
                }
    }
    for (const auto& [key, roles] : degree) {
        auto& entry = s.entries[key];
        for (int r = 0; r < 2; ++r)
            for (const auto& [v, d] : roles[r]) {
                auto& b = entry[r][sketch_bucket(v, n_buckets, seed)];
                b.count += d;
                b.max_degree = std::max(b.max_degree, d);
            }
    }
    return s;
}

}  // namespace cardest
