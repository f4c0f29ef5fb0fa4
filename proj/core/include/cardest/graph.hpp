#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cardest/value.hpp"

namespace cardest {

// Dense internal id: vertices are [0, |V|), edges are [|V|, |I|).
using ElementId = std::uint32_t;
using LabelId = std::uint32_t;
using KeyId = std::uint32_t;

inline constexpr ElementId kNoElement = static_cast<ElementId>(-1);

struct ElementRecord {
    std::string id;
    std::vector<std::string> labels;
    std::map<std::string, Scalar> props;
    // Edges only.
    std::string src;
    std::string trg;
};

class PropertyGraph {
public:
    class Builder;

    PropertyGraph() = default;

    std::size_t num_vertices() const { return n_vertices_; }
    std::size_t num_edges() const { return src_.size(); }
    std::size_t num_ids() const { return n_vertices_ + src_.size(); }

    bool is_vertex(ElementId id) const { return id < n_vertices_; }
    bool is_edge(ElementId id) const { return id >= n_vertices_ && id < num_ids(); }
    ElementId source(ElementId e) const { return src_[e - n_vertices_]; }
    ElementId target(ElementId e) const { return trg_[e - n_vertices_]; }

    std::span<const LabelId> labels(ElementId id) const;
    bool has_label(ElementId id, LabelId l) const;
    const Scalar* property(ElementId id, KeyId k) const;
    std::span<const std::pair<KeyId, Scalar>> properties(ElementId id) const;

    std::size_t num_labels() const { return label_names_.size(); }
    std::size_t num_keys() const { return key_names_.size(); }
    std::optional<LabelId> label_id(std::string_view name) const;
    std::optional<KeyId> key_id(std::string_view name) const;
    const std::string& label_name(LabelId l) const { return label_names_[l]; }
    const std::string& key_name(KeyId k) const { return key_names_[k]; }

    const std::string& external_id(ElementId id) const { return ext_ids_[id]; }
    std::optional<ElementId> find(std::string_view ext) const;

    std::span<const ElementId> out_edges(ElementId v) const;
    std::span<const ElementId> in_edges(ElementId v) const;
    std::span<const ElementId> out_edges(ElementId v, LabelId l) const;
    std::span<const ElementId> in_edges(ElementId v, LabelId l) const;
    // Unknown vertex or unknown label give an empty list.
    std::vector<ElementId> out_edges(std::string_view v, std::optional<std::string_view> label = {}) const;
    std::vector<ElementId> in_edges(std::string_view v, std::optional<std::string_view> label = {}) const;

    // Vertices (or edges) carrying label l, ascending.
    std::span<const ElementId> vertices_with_label(LabelId l) const;
    std::span<const ElementId> edges_with_label(LabelId l) const;

    ElementRecord record(ElementId id) const;

    // Content hash over ids, labels, properties and endpoints.
    std::uint64_t fingerprint() const;
    std::string fingerprint_hex() const;

private:
    struct LabeledIndex {
        std::vector<std::uint32_t> offsets;
        std::vector<LabelId> labels;
        std::vector<ElementId> edges;
        std::span<const ElementId> range(ElementId v, LabelId l) const;
    };

    std::size_t n_vertices_ = 0;
    std::vector<ElementId> src_, trg_;
    std::vector<std::string> ext_ids_;
    std::unordered_map<std::string, ElementId> by_ext_;

    std::vector<std::uint32_t> label_off_;
    std::vector<LabelId> label_data_;
    std::vector<std::uint32_t> prop_off_;
    std::vector<std::pair<KeyId, Scalar>> prop_data_;

    std::vector<std::string> label_names_, key_names_;
    std::unordered_map<std::string, LabelId> label_ids_;
    std::unordered_map<std::string, KeyId> key_ids_;

    std::vector<std::uint32_t> out_off_, in_off_;
    std::vector<ElementId> out_, in_;
    LabeledIndex out_l_, in_l_;
    std::vector<std::vector<ElementId>> vertices_by_label_, edges_by_label_;
};

class PropertyGraph::Builder {
public:
    // Throws IntegrityError on duplicate ids.
    void add_vertex(ElementRecord r);
    void add_edge(ElementRecord r);
    // Throws IntegrityError when an edge references a missing vertex.
    PropertyGraph build() &&;

private:
    std::vector<ElementRecord> vertices_, edges_;
    std::unordered_map<std::string, bool> seen_;
};

PropertyGraph load_graph(const std::filesystem::path& vertex_file, const std::filesystem::path& edge_file);
// Reads <dir>/vertices.jsonl and <dir>/edges.jsonl.
PropertyGraph load_graph_dir(const std::filesystem::path& dir);
void save_graph(const PropertyGraph& g, const std::filesystem::path& vertex_file, const std::filesystem::path& edge_file);
void save_graph_dir(const PropertyGraph& g, const std::filesystem::path& dir);

}  // namespace cardest
