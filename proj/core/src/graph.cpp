#include "cardest/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "cardest/errors.hpp"

namespace cardest {

namespace {

std::span<const ElementId> csr(const std::vector<std::uint32_t>& off, const std::vector<ElementId>& data, std::size_t i) {
    if (i + 1 >= off.size()) return {};
    return {data.data() + off[i], data.data() + off[i + 1]};
}

void fnv(std::uint64_t& h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
}

}  // namespace

std::span<const ElementId> PropertyGraph::LabeledIndex::range(ElementId v, LabelId l) const {
    if (v + 1 >= offsets.size()) return {};
    auto first = labels.begin() + offsets[v];
    auto last = labels.begin() + offsets[v + 1];
    auto [lo, hi] = std::equal_range(first, last, l);
    return {edges.data() + (lo - labels.begin()), edges.data() + (hi - labels.begin())};
}

std::span<const LabelId> PropertyGraph::labels(ElementId id) const {
    return {label_data_.data() + label_off_[id], label_data_.data() + label_off_[id + 1]};
}

bool PropertyGraph::has_label(ElementId id, LabelId l) const {
    auto ls = labels(id);
    return std::binary_search(ls.begin(), ls.end(), l);
}

const Scalar* PropertyGraph::property(ElementId id, KeyId k) const {
    auto ps = properties(id);
    auto it = std::lower_bound(ps.begin(), ps.end(), k, [](const auto& p, KeyId key) { return p.first < key; });
    return it != ps.end() && it->first == k ? &it->second : nullptr;
}

std::span<const std::pair<KeyId, Scalar>> PropertyGraph::properties(ElementId id) const {
    return {prop_data_.data() + prop_off_[id], prop_data_.data() + prop_off_[id + 1]};
}

std::optional<LabelId> PropertyGraph::label_id(std::string_view name) const {
    auto it = label_ids_.find(std::string(name));
    if (it == label_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<KeyId> PropertyGraph::key_id(std::string_view name) const {
    auto it = key_ids_.find(std::string(name));
    if (it == key_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<ElementId> PropertyGraph::find(std::string_view ext) const {
    auto it = by_ext_.find(std::string(ext));
    if (it == by_ext_.end()) return std::nullopt;
    return it->second;
}

std::span<const ElementId> PropertyGraph::out_edges(ElementId v) const { return csr(out_off_, out_, v); }
std::span<const ElementId> PropertyGraph::in_edges(ElementId v) const { return csr(in_off_, in_, v); }
std::span<const ElementId> PropertyGraph::out_edges(ElementId v, LabelId l) const { return out_l_.range(v, l); }
std::span<const ElementId> PropertyGraph::in_edges(ElementId v, LabelId l) const { return in_l_.range(v, l); }

std::vector<ElementId> PropertyGraph::out_edges(std::string_view v, std::optional<std::string_view> label) const {
    auto id = find(v);
    if (!id || !is_vertex(*id)) return {};
    if (!label) {
        auto s = out_edges(*id);
        return {s.begin(), s.end()};
    }
    auto l = label_id(*label);
    if (!l) return {};
    auto s = out_edges(*id, *l);
    return {s.begin(), s.end()};
}

std::vector<ElementId> PropertyGraph::in_edges(std::string_view v, std::optional<std::string_view> label) const {
    auto id = find(v);
    if (!id || !is_vertex(*id)) return {};
    if (!label) {
        auto s = in_edges(*id);
        return {s.begin(), s.end()};
    }
    auto l = label_id(*label);
    if (!l) return {};
    auto s = in_edges(*id, *l);
    return {s.begin(), s.end()};
}

std::span<const ElementId> PropertyGraph::vertices_with_label(LabelId l) const {
    if (l >= vertices_by_label_.size()) return {};
    return vertices_by_label_[l];
}

std::span<const ElementId> PropertyGraph::edges_with_label(LabelId l) const {
    if (l >= edges_by_label_.size()) return {};
    return edges_by_label_[l];
}

ElementRecord PropertyGraph::record(ElementId id) const {
    ElementRecord r;
    r.id = ext_ids_[id];
    for (auto l : labels(id)) r.labels.push_back(label_names_[l]);
    for (const auto& [k, v] : properties(id)) r.props.emplace(key_names_[k], v);
    if (is_edge(id)) {
        r.src = ext_ids_[source(id)];
        r.trg = ext_ids_[target(id)];
    }
    return r;
}

std::uint64_t PropertyGraph::fingerprint() const {
    std::uint64_t h = 14695981039346656037ULL;
    for (ElementId id = 0; id < num_ids(); ++id) {
        auto r = record(id);
        fnv(h, is_vertex(id) ? "v" : "e");
        fnv(h, r.id);
        for (const auto& l : r.labels) fnv(h, l);
        fnv(h, "|");
        for (const auto& [k, v] : r.props) {
            fnv(h, k);
            fnv(h, scalar_to_string(v));
        }
        fnv(h, r.src);
        fnv(h, r.trg);
    }
    return h;
}

std::string PropertyGraph::fingerprint_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint()));
    return buf;
}

void PropertyGraph::Builder::add_vertex(ElementRecord r) {
    if (!seen_.emplace(r.id, true).second) throw IntegrityError("duplicate id '" + r.id + "'");
    vertices_.push_back(std::move(r));
}

void PropertyGraph::Builder::add_edge(ElementRecord r) {
    if (!seen_.emplace(r.id, false).second) throw IntegrityError("duplicate id '" + r.id + "'");
    edges_.push_back(std::move(r));
}

PropertyGraph PropertyGraph::Builder::build() && {
    PropertyGraph g;
    g.n_vertices_ = vertices_.size();
    const std::size_t n = vertices_.size() + edges_.size();
    if (n >= kNoElement) throw ResourceError("graph too large");

    std::set<std::string> label_set, key_set;
    auto scan = [&](const ElementRecord& r) {
        label_set.insert(r.labels.begin(), r.labels.end());
        for (const auto& [k, v] : r.props) key_set.insert(k);
    };
    for (const auto& r : vertices_) scan(r);
    for (const auto& r : edges_) scan(r);
    for (const auto& l : label_set) {
        g.label_ids_.emplace(l, static_cast<LabelId>(g.label_names_.size()));
        g.label_names_.push_back(l);
    }
    for (const auto& k : key_set) {
        g.key_ids_.emplace(k, static_cast<KeyId>(g.key_names_.size()));
        g.key_names_.push_back(k);
    }
    g.vertices_by_label_.resize(g.label_names_.size());
    g.edges_by_label_.resize(g.label_names_.size());

    g.ext_ids_.reserve(n);
    g.label_off_.push_back(0);
    g.prop_off_.push_back(0);
    auto add = [&](const ElementRecord& r) {
        auto id = static_cast<ElementId>(g.ext_ids_.size());
        g.ext_ids_.push_back(r.id);
        g.by_ext_.emplace(r.id, id);
        std::vector<LabelId> ls;
        for (const auto& l : r.labels) ls.push_back(g.label_ids_.at(l));
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        for (auto l : ls) (id < g.n_vertices_ ? g.vertices_by_label_ : g.edges_by_label_)[l].push_back(id);
        g.label_data_.insert(g.label_data_.end(), ls.begin(), ls.end());
        g.label_off_.push_back(static_cast<std::uint32_t>(g.label_data_.size()));
        for (const auto& [k, v] : r.props) g.prop_data_.emplace_back(g.key_ids_.at(k), v);
        std::sort(g.prop_data_.begin() + g.prop_off_.back(), g.prop_data_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        g.prop_off_.push_back(static_cast<std::uint32_t>(g.prop_data_.size()));
    };
    for (const auto& r : vertices_) add(r);
    for (const auto& r : edges_) {
        auto s = g.by_ext_.find(r.src);
        auto t = g.by_ext_.find(r.trg);
        if (s == g.by_ext_.end() || s->second >= g.n_vertices_)
            throw IntegrityError("edge '" + r.id + "' references missing vertex '" + r.src + "'");
        if (t == g.by_ext_.end() || t->second >= g.n_vertices_)
            throw IntegrityError("edge '" + r.id + "' references missing vertex '" + r.trg + "'");
        g.src_.push_back(s->second);
        g.trg_.push_back(t->second);
        add(r);
    }

    const std::size_t nv = g.n_vertices_;
    auto build_index = [&](const std::vector<ElementId>& ends, std::vector<std::uint32_t>& off, std::vector<ElementId>& data,
                           LabeledIndex& li) {
        off.assign(nv + 1, 0);
        for (auto v : ends) ++off[v + 1];
        for (std::size_t i = 0; i < nv; ++i) off[i + 1] += off[i];
        data.resize(ends.size());
        auto pos = off;
        for (std::size_t i = 0; i < ends.size(); ++i) data[pos[ends[i]]++] = static_cast<ElementId>(nv + i);

        std::vector<std::vector<std::pair<LabelId, ElementId>>> per(nv);
        for (std::size_t i = 0; i < ends.size(); ++i) {
            auto e = static_cast<ElementId>(nv + i);
            for (auto l : g.labels(e)) per[ends[i]].emplace_back(l, e);
        }
        li.offsets.assign(1, 0);
        for (auto& p : per) {
            std::sort(p.begin(), p.end());
            for (const auto& [l, e] : p) {
                li.labels.push_back(l);
                li.edges.push_back(e);
            }
            li.offsets.push_back(static_cast<std::uint32_t>(li.labels.size()));
        }
    };
    build_index(g.src_, g.out_off_, g.out_, g.out_l_);
    build_index(g.trg_, g.in_off_, g.in_, g.in_l_);
    return g;
}

}  // namespace cardest
