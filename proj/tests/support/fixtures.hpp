#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cardest/constraint.hpp"
#include "cardest/graph.hpp"
#include "cardest/query.hpp"
#include "cardest/stats.hpp"

namespace cardest::fixtures {

// g1, g3 vertices; g2: g1 -> g3, g4: g3 -> g1. No labels or properties.
PropertyGraph make_g4();
// q1 -q2-> q3 without labels.
QueryPattern g4_query();

QueryDocument job18a_document();

struct RandomGraphSpec {
    std::size_t max_vertices = 12;
    std::size_t max_edges = 30;
    std::size_t vertex_labels = 3;
    std::size_t edge_labels = 2;
    std::size_t values = 3;
    bool multi_labels = true;
};

PropertyGraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec = {});
// Connected query with 1..max_edges edges; labels and properties drawn from the graph vocabulary.
QueryPattern random_query(std::mt19937_64& rng, const PropertyGraph& g, std::size_t max_edges, bool with_props = true);

// Full enumeration over I^|C.I| with per-constraint checks on element records. Test-only.
std::uint64_t oracle_count(const PropertyGraph& g, const ConstraintSet& cs);
double oracle_selectivity(const PropertyGraph& g, const ConstraintSet& cs);

// Catalog with every statistic the PETs need, synopses up to the given size.
StatisticsCatalog full_catalog(const PropertyGraph& g, int synopsis_size = 3);

// Singleton PEs with oracle selectivities for every constraint of q.
PES exact_singletons(const PropertyGraph& g, const QueryPattern& q);

}  // namespace cardest::fixtures
