#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardest/constraint.hpp"
#include "cardest/graph.hpp"
#include "cardest/query.hpp"
#include "cardest/stats.hpp"

namespace cardest {

enum class PetKind { EdgePattern, Chain, SourceStar, TargetStar, SysR, CharSets, BoundSketch, Sampling, WanderJoin, MDHistogram, Defaults };

struct PetSpec {
    PetKind kind = PetKind::EdgePattern;
    int size = 1;
    SamplePattern sample_pattern = SamplePattern::Id;
    std::optional<double> sample_probability;
    std::uint64_t walks = 1000;
    std::string tag;
};

// Tags: EP, cN, sN, tN, SysR, CS, BS, S(pt,pr), WJ(n), MDH, defaults.
PetSpec parse_pet_tag(std::string_view tag);
// Comma separated, commas inside parentheses are kept.
std::vector<std::string> split_tags(std::string_view text);
std::vector<PetSpec> parse_pet_list(std::string_view text);

// 1/10 for EQ, 9/10 for NEQ, 1/3 otherwise.
double default_selectivity(Predicate op);

// c / n_ids^k; 0 when the graph is empty.
double to_selectivity(double cardinality, std::size_t k, std::uint64_t n_ids);

PartialEstimate individual_estimate(const Constraint& c, const StatisticsCatalog& cat, bool defaults_only = false);
PES pet_individual(const QueryPattern& q, const StatisticsCatalog& cat, bool defaults_only = false);

// cls Edge uses the edge synopsis; Chain extends past the stored size with the Markov assumption.
PES pet_labeled_synopsis(const QueryPattern& q, const StatisticsCatalog& cat, SynopsisClass cls, int size);
PES pet_sysr(const QueryPattern& q, const StatisticsCatalog& cat);
PES pet_bound_sketch(const QueryPattern& q, const StatisticsCatalog& cat);
PES pet_char_sets(const QueryPattern& q, const StatisticsCatalog& cat);
PES pet_sampling(const QueryPattern& q, const StatisticsCatalog& cat, SamplePattern pt,
                 std::optional<double> probability = std::nullopt);
std::optional<PartialEstimate> pet_wander_join(const QueryPattern& q, const PropertyGraph& g, std::uint64_t walks,
                                               std::uint64_t seed);
PES pet_md_histogram(const QueryPattern& q, const StatisticsCatalog& cat);

// Query edge order used by wander join; empty when no valid order exists.
std::vector<std::string> wander_join_plan(const QueryPattern& q);

// Every way to pick one label (or the wildcard for unlabeled ids) per id; at most `cap` choices.
std::vector<std::map<std::string, std::string>> label_choices(const QueryPattern& q, const std::vector<std::string>& ids,
                                                              std::size_t cap = 64);

}  // namespace cardest
