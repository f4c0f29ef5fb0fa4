#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cardest/graph.hpp"
#include "cardest/value.hpp"

namespace cardest {

inline const std::string kWildcard = "*";

struct LabelCount {
    std::uint64_t vertices = 0;
    std::uint64_t edges = 0;
    std::uint64_t total() const { return vertices + edges; }
};

struct PropTriple {
    std::string key;
    Predicate op = Predicate::EQ;
    Operand value;
};

std::string prop_triple_key(const std::string& key, Predicate op, const Operand& value);

struct BasicStats {
    std::uint64_t n_vertices = 0;
    std::uint64_t n_edges = 0;
    std::uint64_t n_ids = 0;
    std::map<std::string, LabelCount> label_sel;
    std::map<std::string, std::uint64_t> key_sel;
    // prop_triple_key -> number of elements satisfying it.
    std::map<std::string, std::uint64_t> prop_exact;
};

BasicStats build_basic(const PropertyGraph& g, const std::vector<PropTriple>& exact_triples = {});

enum class SynopsisClass { Edge, Chain, SourceStar, TargetStar };

std::string_view synopsis_class_name(SynopsisClass c);

// Key of a chain (or edge) pattern: vertex labels v0..vn, edge labels e1..en, "*" for wildcard.
std::string chain_key(SynopsisClass cls, const std::vector<std::string>& vertex_labels,
                      const std::vector<std::string>& edge_labels);
// Key of a star; arms are (edge label, leaf label) and are sorted internally.
std::string star_key(SynopsisClass cls, const std::string& center_label,
                     std::vector<std::pair<std::string, std::string>> arms);
// Key of a labeled edge pattern (src, edge, trg).
std::string edge_pattern_key(const std::string& src, const std::string& edge, const std::string& trg);

struct LabeledTopoSynopsis {
    SynopsisClass cls = SynopsisClass::Edge;
    int max_size = 1;
    std::map<std::string, std::uint64_t> counts;
};

// Counts of every labeled pattern of the class with 1..max_size edges (homomorphic).
LabeledTopoSynopsis build_labeled_synopsis(const PropertyGraph& g, SynopsisClass cls, int max_size);

struct SysREntry {
    std::uint64_t n = 0;
    std::uint64_t distinct_src = 0;
    std::uint64_t distinct_trg = 0;
};

struct SysRStats {
    std::map<std::string, SysREntry> entries;
};

SysRStats build_sysr(const PropertyGraph& g);

enum class Direction { Out, In };

struct CharacteristicSet {
    std::set<std::string> labels;
    std::set<std::string> keys;
    std::uint64_t count = 0;
    std::map<std::string, std::uint64_t> label_counts;
};

struct CharacteristicSetStore {
    Direction direction = Direction::Out;
    std::size_t max_entries = 10000;
    std::vector<CharacteristicSet> entries;
};

// One entry per distinct set of incident edge labels plus property keys, merged down to max_entries.
CharacteristicSetStore build_char_sets(const PropertyGraph& g, std::size_t max_entries, Direction dir = Direction::Out);
// Exposed for tests: merges the least frequent entries until at most max_entries remain.
void merge_char_sets(CharacteristicSetStore& store);
// Σ over stored supersets of |CS'| · Π count(l)/|CS'|; arm labels may repeat.
double char_set_estimate(const CharacteristicSetStore& store, const std::vector<std::string>& arm_labels,
                         const std::set<std::string>& keys);

struct SketchBucket {
    std::uint64_t count = 0;
    std::uint64_t max_degree = 0;
};

enum class Role { Src = 0, Trg = 1 };

struct BoundSketch {
    std::uint32_t n_buckets = 1;
    std::uint64_t seed = 0;
    // edge_pattern_key -> per role, bucket -> summary.
    std::map<std::string, std::array<std::map<std::uint32_t, SketchBucket>, 2>> entries;
};

std::uint32_t sketch_bucket(ElementId vertex, std::uint32_t n_buckets, std::uint64_t seed);
BoundSketch build_bound_sketch(const PropertyGraph& g, std::uint32_t n_buckets, std::uint64_t seed);

enum class SamplePattern { Id, Vertex, EdgePattern };

std::string_view sample_pattern_name(SamplePattern p);
SamplePattern parse_sample_pattern(std::string_view s);

struct SampledElement {
    bool is_vertex = true;
    std::vector<std::string> labels;
    std::map<std::string, Scalar> props;
};

// One element, or (src, edge, trg) for edge-pattern samples.
struct SampleMember {
    std::vector<SampledElement> parts;
    bool self_loop = false;
};

struct Sample {
    SamplePattern pattern = SamplePattern::Id;
    double probability = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t population = 0;
    std::vector<SampleMember> members;
};

Sample build_sample(const PropertyGraph& g, SamplePattern pt, double pr, std::uint64_t seed);

enum class HistogramKind { EquiWidth, EquiDepth };
enum class HistogramDomain { Numeric, StringPrefix };

struct HistogramBucket {
    double lo = 0;
    double hi = 0;
    std::string prefix;
    std::uint64_t count = 0;
    std::uint64_t distinct = 0;
};

struct Histogram {
    std::string key;
    HistogramKind kind = HistogramKind::EquiWidth;
    HistogramDomain domain = HistogramDomain::Numeric;
    std::size_t prefix_length = 1;
    std::vector<HistogramBucket> buckets;
    std::uint64_t total = 0;

    // Estimated number of elements satisfying (key op value); nullopt when the
    // histogram cannot answer the predicate.
    std::optional<double> estimate(Predicate op, const Operand& value) const;
};

Histogram build_histogram(const PropertyGraph& g, const std::string& key, HistogramKind kind, std::size_t n_buckets);

struct MDCell {
    std::uint64_t count = 0;
    std::vector<std::uint64_t> distinct;
};

struct MDHistogram {
    std::vector<std::string> keys;
    // Per axis, n_buckets + 1 ascending boundaries.
    std::vector<std::vector<double>> bounds;
    std::map<std::vector<std::uint32_t>, MDCell> grid;
    std::uint64_t total = 0;

    // preds[i] are the predicates on keys[i] (may be empty).
    double estimate(const std::vector<std::vector<std::pair<Predicate, Operand>>>& preds) const;
};

// Built over elements whose values for all keys are numeric.
MDHistogram build_md_histogram(const PropertyGraph& g, const std::vector<std::string>& keys, std::size_t n_buckets_per_axis);

struct StatisticsCatalog {
    static constexpr int kVersion = 1;

    std::string fingerprint;
    BasicStats basic;
    std::vector<LabeledTopoSynopsis> synopses;
    std::optional<SysRStats> sysr;
    std::optional<CharacteristicSetStore> cs;
    std::optional<CharacteristicSetStore> cs_in;
    std::vector<BoundSketch> sketches;
    std::vector<Sample> samples;
    std::vector<Histogram> histograms;
    std::vector<MDHistogram> md_histograms;

    // Smallest synopsis of the class with max_size >= size.
    const LabeledTopoSynopsis* synopsis(SynopsisClass cls, int size) const;
    const Histogram* histogram(const std::string& key) const;
};

struct SampleSpec {
    SamplePattern pattern = SamplePattern::Id;
    double probability = 1.0;
};

struct HistogramSpec {
    std::string key;
    HistogramKind kind = HistogramKind::EquiDepth;
    std::size_t buckets = 16;
};

struct MDHistogramSpec {
    std::vector<std::string> keys;
    std::size_t buckets = 8;
};

struct StatsConfig {
    // e.g. edge, chain2, sstar3, tstar2.
    std::vector<std::pair<SynopsisClass, int>> synopses;
    bool sysr = true;
    std::size_t cs_max_entries = 0;  // 0 = not built
    bool cs_in = false;
    std::vector<SampleSpec> samples;
    std::uint32_t sketch_buckets = 0;  // 0 = not built
    std::vector<HistogramSpec> histograms;
    std::vector<MDHistogramSpec> md_histograms;
    std::vector<PropTriple> exact_props;
    std::uint64_t seed = 42;
};

// Parses "edge,chain2,sstar3,tstar2".
std::vector<std::pair<SynopsisClass, int>> parse_synopsis_list(std::string_view text);

StatisticsCatalog build_catalog(const PropertyGraph& g, const StatsConfig& cfg);

std::string catalog_to_string(const StatisticsCatalog& c);
StatisticsCatalog catalog_from_string(const std::string& text);
void save_catalog(const StatisticsCatalog& c, const std::filesystem::path& path);
StatisticsCatalog load_catalog(const std::filesystem::path& path);
// Warning text when the catalog was built from a different graph.
std::optional<std::string> stale_catalog_warning(const StatisticsCatalog& c, const PropertyGraph& g);

}  // namespace cardest
