#include <algorithm>
#include <cmath>
#include <limits>

#include "cardest/pets.hpp"

namespace cardest {

namespace {

using Choice = std::map<std::string, std::string>;

bool label_known(const StatisticsCatalog& cat, const std::string& l) {
    return l == kWildcard || cat.basic.label_sel.count(l) > 0;
}

bool all_known(const StatisticsCatalog& cat, const Choice& ch) {
    return std::all_of(ch.begin(), ch.end(), [&](const auto& kv) { return label_known(cat, kv.second); });
}

ConstraintSet labeled(const QueryPattern& q, const std::vector<std::string>& edges, const Choice& ch) {
    ConstraintSet cs = topological_constraints(q, edges);
    for (const auto& [id, l] : ch)
        if (l != kWildcard) cs.insert(Constraint::has_label(id, l));
    return cs;
}

// Stored count, 0 for a pattern over known labels that never occurs, nullopt otherwise.
std::optional<double> lookup(const std::map<std::string, std::uint64_t>& counts, const std::string& key,
                             const StatisticsCatalog& cat, const Choice& ch) {
    auto it = counts.find(key);
    if (it != counts.end()) return static_cast<double>(it->second);
    if (all_known(cat, ch)) return 0.0;
    return std::nullopt;
}

std::vector<std::string> path_ids(const Subpattern& sp) {
    std::vector<std::string> ids = sp.vertices;
    ids.insert(ids.end(), sp.edges.begin(), sp.edges.end());
    return ids;
}

std::vector<std::string> star_ids(const Subpattern& sp) {
    std::vector<std::string> ids{sp.center};
    ids.insert(ids.end(), sp.edges.begin(), sp.edges.end());
    ids.insert(ids.end(), sp.vertices.begin(), sp.vertices.end());
    return ids;
}

std::string chain_window_key(SynopsisClass cls, const Subpattern& sp, const Choice& ch, std::size_t from, std::size_t len) {
    std::vector<std::string> vl, el;
    for (std::size_t i = from; i <= from + len; ++i) vl.push_back(ch.at(sp.vertices[i]));
    for (std::size_t i = from; i < from + len; ++i) el.push_back(ch.at(sp.edges[i]));
    return chain_key(cls, vl, el);
}

// Largest star per center (up to 6 arms), plus every single edge.
std::vector<Subpattern> maximal_mixed_stars(const QueryPattern& q) {
    std::vector<Subpattern> out = enumerate_subpatterns(q, {PatternClass::Edge, 1});
    std::set<std::string> done;
    for (int k = 6; k >= 2; --k) {
        std::set<std::string> hit;
        for (auto& sp : enumerate_subpatterns(q, {PatternClass::Star, k})) {
            if (done.count(sp.center)) continue;
            hit.insert(sp.center);
            out.push_back(std::move(sp));
        }
        done.insert(hit.begin(), hit.end());
    }
    return out;
}

// Whether the star center is the source of each arm.
std::vector<bool> center_is_source(const QueryPattern& q, const Subpattern& sp) {
    std::vector<bool> out;
    if (sp.kind == PatternClass::Edge) return {true};
    for (const auto& e : sp.edges) out.push_back(q.edge(e)->src == sp.center);
    return out;
}

std::string arm_pattern_key(const QueryPattern& q, const std::string& edge, const Choice& ch) {
    const auto* e = q.edge(edge);
    return edge_pattern_key(ch.at(e->src), ch.at(e->id), ch.at(e->trg));
}

}  // namespace

PES pet_labeled_synopsis(const QueryPattern& q, const StatisticsCatalog& cat, SynopsisClass cls, int size) {
    PES out;
    const auto n_ids = cat.basic.n_ids;
    if (cls == SynopsisClass::Edge) {
        SynopsisClass key_cls = SynopsisClass::Edge;
        const auto* syn = cat.synopsis(SynopsisClass::Edge, 1);
        if (!syn) {
            syn = cat.synopsis(SynopsisClass::Chain, 1);
            key_cls = SynopsisClass::Chain;
        }
        if (!syn) return out;
        for (const auto& sp : enumerate_subpatterns(q, {PatternClass::Edge, 1})) {
            for (const auto& ch : label_choices(q, path_ids(sp))) {
                auto key = chain_key(key_cls, {ch.at(sp.vertices[0]), ch.at(sp.vertices[1])}, {ch.at(sp.edges[0])});
                auto c = lookup(syn->counts, key, cat, ch);
                if (!c) continue;
                out.push_back({labeled(q, sp.edges, ch), to_selectivity(*c, 3, n_ids), Technique::Synopsis, "EP"});
            }
        }
        return out;
    }
    const auto* syn = cat.synopsis(cls, size);
    if (!syn) return out;
    const std::string tag = std::string(1, cls == SynopsisClass::Chain ? 'c' : cls == SynopsisClass::SourceStar ? 's' : 't') +
                            std::to_string(size);
    if (cls == SynopsisClass::Chain) {
        const auto n = static_cast<std::size_t>(size);
        const std::size_t longest = size >= 2 ? q.edges.size() : n;
        for (std::size_t m = 1; m <= longest; ++m) {
            for (const auto& sp : enumerate_subpatterns(q, {PatternClass::Chain, static_cast<int>(m)})) {
                if (sp.edges.size() != m) continue;
                for (const auto& ch : label_choices(q, path_ids(sp))) {
                    std::optional<double> card;
                    if (m <= n) {
                        card = lookup(syn->counts, chain_window_key(cls, sp, ch, 0, m), cat, ch);
                    } else {
                        card = lookup(syn->counts, chain_window_key(cls, sp, ch, 0, n), cat, ch);
                        for (std::size_t i = 1; card && i + n <= m; ++i) {
                            auto w = lookup(syn->counts, chain_window_key(cls, sp, ch, i, n), cat, ch);
                            auto o = lookup(syn->counts, chain_window_key(cls, sp, ch, i, n - 1), cat, ch);
                            if (!w || !o) {
                                card.reset();
                                break;
                            }
                            card = *o > 0 ? *card * *w / *o : 0.0;
                        }
                    }
                    if (!card) continue;
                    out.push_back({labeled(q, sp.edges, ch), to_selectivity(*card, 2 * m + 1, n_ids), Technique::Synopsis, tag});
                }
            }
        }
        return out;
    }
    const auto pc = cls == SynopsisClass::SourceStar ? PatternClass::SourceStar : PatternClass::TargetStar;
    for (int k = 1; k <= size; ++k) {
        for (const auto& sp : enumerate_subpatterns(q, {pc, k})) {
            for (const auto& ch : label_choices(q, star_ids(sp))) {
                std::vector<std::pair<std::string, std::string>> arms;
                for (std::size_t i = 0; i < sp.edges.size(); ++i) arms.emplace_back(ch.at(sp.edges[i]), ch.at(sp.vertices[i]));
                auto c = lookup(syn->counts, star_key(cls, ch.at(sp.center), arms), cat, ch);
                if (!c) continue;
                out.push_back({labeled(q, sp.edges, ch), to_selectivity(*c, 2 * static_cast<std::size_t>(k) + 1, n_ids),
                               Technique::Synopsis, tag});
            }
        }
    }
    return out;
}

PES pet_sysr(const QueryPattern& q, const StatisticsCatalog& cat) {
    PES out;
    if (!cat.sysr) return out;
    const auto& entries = cat.sysr->entries;
    for (const auto& sp : maximal_mixed_stars(q)) {
        auto ids = sp.kind == PatternClass::Edge ? path_ids(sp) : star_ids(sp);
        auto dir = center_is_source(q, sp);
        for (const auto& ch : label_choices(q, ids)) {
            double min_distinct = std::numeric_limits<double>::infinity();
            double prod = 1.0;
            bool skip = false;
            for (std::size_t i = 0; i < sp.edges.size(); ++i) {
                auto it = entries.find(arm_pattern_key(q, sp.edges[i], ch));
                SysREntry e;
                if (it != entries.end()) e = it->second;
                else if (!all_known(cat, ch)) skip = true;
                double d = static_cast<double>(dir[i] ? e.distinct_src : e.distinct_trg);
                min_distinct = std::min(min_distinct, d);
                prod = d > 0 ? prod * static_cast<double>(e.n) / d : 0.0;
            }
            if (skip) continue;
            double card = min_distinct * prod;
            if (!std::isfinite(card)) card = 0.0;
            out.push_back({labeled(q, sp.edges, ch), to_selectivity(card, 1 + 2 * sp.edges.size(), cat.basic.n_ids),
                           Technique::SysR, "SysR"});
        }
    }
    return out;
}

PES pet_bound_sketch(const QueryPattern& q, const StatisticsCatalog& cat) {
    PES out;
    if (cat.sketches.empty()) return out;
    const auto& sk = cat.sketches.front();
    static const std::map<std::uint32_t, SketchBucket> empty;
    for (const auto& sp : maximal_mixed_stars(q)) {
        auto ids = sp.kind == PatternClass::Edge ? path_ids(sp) : star_ids(sp);
        auto dir = center_is_source(q, sp);
        for (const auto& ch : label_choices(q, ids)) {
            std::vector<const std::map<std::uint32_t, SketchBucket>*> arms;
            bool skip = false;
            for (std::size_t i = 0; i < sp.edges.size(); ++i) {
                auto it = sk.entries.find(arm_pattern_key(q, sp.edges[i], ch));
                if (it == sk.entries.end()) {
                    if (!all_known(cat, ch)) skip = true;
                    arms.push_back(&empty);
                } else {
                    arms.push_back(&it->second[static_cast<std::size_t>(dir[i] ? Role::Src : Role::Trg)]);
                }
            }
            if (skip) continue;
            double bound = 0;
            for (const auto& [b, first] : *arms[0]) {
                std::vector<const SketchBucket*> row;
                for (const auto* a : arms) {
                    auto it = a->find(b);
                    row.push_back(it == a->end() ? nullptr : &it->second);
                }
                if (std::find(row.begin(), row.end(), nullptr) != row.end()) continue;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < row.size(); ++i) {
                    double v = static_cast<double>(row[i]->count);
                    for (std::size_t j = 0; j < row.size(); ++j)
                        if (j != i) v *= static_cast<double>(row[j]->max_degree);
                    best = std::min(best, v);
                }
                bound += best;
            }
            out.push_back({labeled(q, sp.edges, ch), to_selectivity(bound, 1 + 2 * sp.edges.size(), cat.basic.n_ids),
                           Technique::Sketch, "BS"});
        }
    }
    return out;
}

PES pet_char_sets(const QueryPattern& q, const StatisticsCatalog& cat) {
    PES out;
    for (auto [pc, store] : {std::pair{PatternClass::CsPattern, &cat.cs}, std::pair{PatternClass::TargetCsPattern, &cat.cs_in}}) {
        if (!*store) continue;
        for (const auto& sp : enumerate_subpatterns(q, {pc, 0})) {
            bool unlabeled = std::any_of(sp.edges.begin(), sp.edges.end(),
                                         [&](const std::string& e) { return q.edge(e)->labels.empty(); });
            if (unlabeled) continue;
            std::set<std::string> keys;
            for (const auto& c : sp.constraints)
                if (c.kind() == ConstraintKind::HasKey && c.id() == sp.center) keys.insert(c.name());
            for (const auto& ch : label_choices(q, sp.edges)) {
                ConstraintSet cs = topological_constraints(q, sp.edges);
                cs.insert(Constraint::vertex(sp.center));
                std::vector<std::string> arm_labels;
                for (const auto& e : sp.edges) {
                    arm_labels.push_back(ch.at(e));
                    cs.insert(Constraint::has_label(e, ch.at(e)));
                }
                for (const auto& k : keys) cs.insert(Constraint::has_key(sp.center, k));
                double card = char_set_estimate(**store, arm_labels, keys);
                out.push_back({std::move(cs), to_selectivity(card, 1 + 2 * sp.edges.size(), cat.basic.n_ids),
                               Technique::CharSets, pc == PatternClass::CsPattern ? "CS" : "CS-in"});
            }
        }
    }
    return out;
}

}  // namespace cardest
