#include <algorithm>
#include <tuple>

#include "cardest/errors.hpp"
#include "cardest/stats.hpp"

namespace cardest {

namespace {

std::size_t set_size(const CharacteristicSet& c) { return c.labels.size() + c.keys.size(); }

std::string cs_key(const CharacteristicSet& c) {
    std::string k;
    for (const auto& l : c.labels) k += "l:" + l + ";";
    for (const auto& x : c.keys) k += "k:" + x + ";";
    return k;
}

bool contains(const CharacteristicSet& sup, const CharacteristicSet& sub) {
    return std::includes(sup.labels.begin(), sup.labels.end(), sub.labels.begin(), sub.labels.end()) &&
           std::includes(sup.keys.begin(), sup.keys.end(), sub.keys.begin(), sub.keys.end());
}

std::size_t overlap(const CharacteristicSet& a, const CharacteristicSet& b) {
    std::size_t n = 0;
    for (const auto& l : a.labels) n += b.labels.count(l);
    for (const auto& k : a.keys) n += b.keys.count(k);
    return n;
}

void absorb(CharacteristicSet& into, const CharacteristicSet& part) {
    into.count += part.count;
    for (const auto& [l, c] : part.label_counts) into.label_counts[l] += c;
}

// Merges `part` into the kept entries: smallest superset first (ties: most frequent, then key);
// otherwise split off the largest piece that some kept entry contains and recurse on the rest.
void merge_part(std::vector<CharacteristicSet>& kept, CharacteristicSet part, std::size_t fallback) {
    auto better = [](const CharacteristicSet& a, const CharacteristicSet& b) {
        return std::make_tuple(set_size(a), -static_cast<long double>(a.count), cs_key(a)) <
               std::make_tuple(set_size(b), -static_cast<long double>(b.count), cs_key(b));
    };
    std::size_t best = kept.size();
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (contains(kept[i], part) && (best == kept.size() || better(kept[i], kept[best]))) best = i;
    if (best < kept.size()) {
        absorb(kept[best], part);
        return;
    }
    std::size_t host = kept.size();
    std::size_t host_overlap = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        auto o = overlap(part, kept[i]);
        if (o > host_overlap || (o == host_overlap && o > 0 && better(kept[i], kept[host]))) {
            host = i;
            host_overlap = o;
        }
    }
    if (host == kept.size()) {
        // Nothing overlaps: widen the entry that took the rest of this vertex group.
        auto& into = kept[std::min(fallback, kept.size() - 1)];
        into.labels.insert(part.labels.begin(), part.labels.end());
        into.keys.insert(part.keys.begin(), part.keys.end());
        absorb(into, part);
        return;
    }
    CharacteristicSet a, b;
    for (const auto& l : part.labels) (kept[host].labels.count(l) ? a : b).labels.insert(l);
    for (const auto& k : part.keys) (kept[host].keys.count(k) ? a : b).keys.insert(k);
    for (const auto& [l, c] : part.label_counts) (a.labels.count(l) ? a : b).label_counts[l] = c;
    a.count = part.count;
    b.count = 0;
    std::size_t a_target = kept.size();
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (contains(kept[i], a) && (a_target == kept.size() || better(kept[i], kept[a_target]))) a_target = i;
    absorb(kept[a_target], a);
    merge_part(kept, std::move(b), a_target);
}

}  // namespace

CharacteristicSetStore build_char_sets(const PropertyGraph& g, std::size_t max_entries, Direction dir) {
    if (max_entries < 1) throw ConfigError("characteristic sets need max_entries >= 1");
    CharacteristicSetStore store;
    store.direction = dir;
    store.max_entries = max_entries;
    std::map<std::string, std::size_t> index;
    for (ElementId v = 0; v < g.num_vertices(); ++v) {
        CharacteristicSet cs;
        cs.count = 1;
        for (auto e : dir == Direction::Out ? g.out_edges(v) : g.in_edges(v))
            for (auto l : g.labels(e)) {
                cs.labels.insert(g.label_name(l));
                ++cs.label_counts[g.label_name(l)];
            }
        for (const auto& [k, val] : g.properties(v)) cs.keys.insert(g.key_name(k));
        auto key = cs_key(cs);
        auto [it, fresh] = index.emplace(key, store.entries.size());
        if (fresh) store.entries.push_back(std::move(cs));
        else absorb(store.entries[it->second], cs);
    }
    merge_char_sets(store);
    return store;
}

void merge_char_sets(CharacteristicSetStore& store) {
    auto& entries = store.entries;
    std::sort(entries.begin(), entries.end(), [](const CharacteristicSet& a, const CharacteristicSet& b) {
        if (a.count != b.count) return a.count > b.count;
        return cs_key(a) < cs_key(b);
    });
    if (entries.size() <= store.max_entries) return;
    std::vector<CharacteristicSet> kept(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(store.max_entries));
    for (std::size_t i = store.max_entries; i < entries.size(); ++i) merge_part(kept, entries[i], 0);
    entries = std::move(kept);
}

double char_set_estimate(const CharacteristicSetStore& store, const std::vector<std::string>& arm_labels,
                         const std::set<std::string>& keys) {
    double total = 0;
    for (const auto& e : store.entries) {
        if (e.count == 0) continue;
        bool ok = std::includes(e.keys.begin(), e.keys.end(), keys.begin(), keys.end());
        for (const auto& l : arm_labels) ok = ok && e.labels.count(l);
        if (!ok) continue;
        double c = static_cast<double>(e.count);
        double est = c;
        for (const auto& l : arm_labels) est *= static_cast<double>(e.label_counts.at(l)) / c;
        total += est;
    }
    return total;
}

}  // namespace cardest
