#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardest/constraint.hpp"
#include "cardest/query.hpp"
#include "cardest/stats.hpp"

namespace cardest {

enum class SortStrategy { SaNd, Sd, NdSa, NdSd, NaSd, NaSa, Di, MoNd, MoDi };

SortStrategy parse_sort_strategy(std::string_view tag);
std::string_view sort_strategy_name(SortStrategy s);

// Selectivity of each constraint that has a singleton PE.
using SingletonMap = std::map<Constraint, double>;

SingletonMap singleton_map(const PES& pes);

// Adds an individual PE for every constraint of C(q) not covered by pes.
PES make_complete(const PES& pes, const QueryPattern& q, const StatisticsCatalog& cat);

// max(s / Πs_c, Πs_c / s); infinity when exactly one side is zero, 1 when both are.
double deviation_from_independence(const PartialEstimate& pe, const SingletonMap& singles);

struct CombineFactor {
    std::string pe;
    double factor = 1.0;
    std::string note;
};

struct CombineTrace {
    std::vector<CombineFactor> factors;
    std::vector<std::string> notes;
};

double combine_cond_indep(const PES& cpes, const QueryPattern& q, SortStrategy strategy, CombineTrace* trace = nullptr);

struct MaxEntOptions {
    int mps = 12;
    double tol = 1e-9;
    int max_iter = 10000;
};

inline constexpr int kMaxEntHardCap = 20;

struct MaxEntResult {
    double selectivity = 1.0;
    bool converged = true;
    double residual = 0.0;
    std::size_t dropped = 0;
};

MaxEntResult combine_max_ent(const PES& cpes, const QueryPattern& q, const MaxEntOptions& opt = {},
                             CombineTrace* trace = nullptr);

struct BoundsResult {
    double lower = 0.0;
    double upper = 1.0;
    // Greedy search replaced the exact one.
    bool greedy = false;
};

inline constexpr std::size_t kExactBoundsLimit = 20;

BoundsResult combine_bounds(const PES& cpes, const QueryPattern& q, std::size_t exact_limit = kExactBoundsLimit);

double selectivity_to_cardinality(double s, std::size_t n_query_ids, std::uint64_t n_ids);

}  // namespace cardest
