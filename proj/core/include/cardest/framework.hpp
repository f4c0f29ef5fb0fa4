#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardest/combine.hpp"
#include "cardest/epests.hpp"
#include "cardest/graph.hpp"
#include "cardest/matcher.hpp"
#include "cardest/pets.hpp"
#include "cardest/query.hpp"
#include "cardest/stats.hpp"

namespace cardest {

enum class CtKind { CondIndep, MaxEnt, Bounds };

struct CtSpec {
    CtKind kind = CtKind::CondIndep;
    SortStrategy strategy = SortStrategy::MoDi;
    MaxEntOptions max_ent;
    std::string tag = "condIndep(MoDi)";
};

// condIndep(<strategy>), maxEnt, maxEnt(mps=12,tol=1e-9,iter=10000), bounds.
CtSpec parse_ct_tag(std::string_view tag);

struct EstimatorConfig {
    std::vector<PetSpec> pets;
    std::vector<EpestSpec> epests;
    CtSpec ct;
    std::uint64_t seed = 42;
    std::size_t max_expansions = 64;
    std::uint64_t oracle_budget = kDefaultOracleBudget;
};

EstimatorConfig make_config(std::string_view pets, std::string_view epests, std::string_view ct);

struct TraceEntry {
    std::string constraints;
    double selectivity = 0.0;
    std::string provenance;
    bool low_confidence = false;
};

struct EstimateReport {
    double selectivity = 1.0;
    double cardinality = 1.0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::vector<TraceEntry> pes;
    std::vector<CombineFactor> factors;
    std::vector<std::string> notes;
    bool fallback = false;
    bool clamped = false;
    std::size_t expansions = 1;
    double wall_ms = 0.0;
};

// Runs the enabled PETs plus the individual one; sorted by (tag, set key).
PES run_pets(const QueryPattern& q, const PropertyGraph* g, const StatisticsCatalog& cat, const EstimatorConfig& cfg);

// One PE per constraint set, the most trusted technique wins.
PES dedupe(const PES& pes);

// Combines a complete PES with the configured CT.
EstimateReport combine(const PES& cpes, const QueryPattern& q, std::uint64_t n_ids, const CtSpec& ct);

// g may be null; graph-walking PETs are then skipped.
EstimateReport estimate(const QueryPattern& q, const PropertyGraph* g, const StatisticsCatalog& cat,
                        const EstimatorConfig& cfg);

// Expands anyOf groups (one alternative per group) and sums the cardinalities.
std::vector<QueryPattern> expand_disjunctions(const QueryDocument& doc, std::size_t cap);
EstimateReport estimate_document(const QueryDocument& doc, const PropertyGraph* g, const StatisticsCatalog& cat,
                                 const EstimatorConfig& cfg);

std::string report_to_text(const EstimateReport& r);
std::string report_to_json(const EstimateReport& r);

}  // namespace cardest
