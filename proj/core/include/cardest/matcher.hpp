#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cardest/constraint.hpp"
#include "cardest/graph.hpp"
#include "cardest/query.hpp"

namespace cardest {

using Mapping = std::map<std::string, ElementId>;

enum class Semantics { Homomorphic, Isomorphic };

inline constexpr std::uint64_t kDefaultOracleBudget = 100'000'000;

bool check_constraint(const PropertyGraph& g, const Mapping& m, const Constraint& c);

// |Sat(C(q))|. Throws OracleBudgetError past `budget` node expansions.
std::uint64_t exact_matches(const PropertyGraph& g, const QueryPattern& q, Semantics sem = Semantics::Homomorphic,
                            std::uint64_t budget = kDefaultOracleBudget);

// Number of assignments of C.I satisfying every constraint of cs.
std::uint64_t count_satisfying(const PropertyGraph& g, const ConstraintSet& cs, Semantics sem = Semantics::Homomorphic,
                               std::uint64_t budget = kDefaultOracleBudget);

// count_satisfying / |I|^{|C.I|}.
double exact_selectivity(const PropertyGraph& g, const ConstraintSet& cs, std::uint64_t budget = kDefaultOracleBudget);

}  // namespace cardest
