#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cardest/combine.hpp"
#include "cardest/errors.hpp"
#include "cardest/pets.hpp"
#include "fixtures.hpp"

using namespace cardest;

namespace {

PartialEstimate pe(ConstraintSet cs, double s, std::string tag = "t") { return {std::move(cs), s, Technique::Exact, std::move(tag)}; }

// Independent vertex ids a..f, one constraint each.
QueryPattern vertices(int n) {
    QueryPattern q;
    for (int i = 0; i < n; ++i) q.vertices.push_back({std::string(1, static_cast<char>('a' + i)), {}});
    return q;
}

Constraint v(char id) { return Constraint::vertex(std::string(1, id)); }

const SortStrategy kAll[] = {SortStrategy::SaNd, SortStrategy::Sd,   SortStrategy::NdSa, SortStrategy::NdSd, SortStrategy::NaSd,
                             SortStrategy::NaSa, SortStrategy::Di,   SortStrategy::MoNd, SortStrategy::MoDi};

}  // namespace

TEST(Combine, StrategyNames) {
    for (auto s : kAll) EXPECT_EQ(parse_sort_strategy(sort_strategy_name(s)), s);
    EXPECT_THROW(parse_sort_strategy("Zz"), ConfigError);
}

TEST(Combine, MakeComplete) {
    auto q = fixtures::g4_query();
    auto cat = fixtures::full_catalog(fixtures::make_g4());
    EXPECT_EQ(make_complete({}, q, cat).size(), 5u);
    auto full = pet_individual(q, cat);
    EXPECT_EQ(make_complete(full, q, cat).size(), full.size());

    auto job = fixtures::job18a_document().pattern;
    PES almost = pet_individual(job, cat);
    auto missing = *std::find_if(almost.begin(), almost.end(), [](const PartialEstimate& p) {
        return p.constraints.begin()->kind() == ConstraintKind::PropValue;
    });
    almost.erase(std::remove_if(almost.begin(), almost.end(), [&](const PartialEstimate& p) { return p.constraints == missing.constraints; }),
                 almost.end());
    auto done = make_complete(almost, job, cat);
    ASSERT_EQ(done.size(), almost.size() + 1);
    EXPECT_EQ(done.back().constraints, missing.constraints);
}

TEST(Combine, Deviation) {
    SingletonMap singles{{v('a'), 0.1}, {v('b'), 0.01}};
    EXPECT_DOUBLE_EQ(deviation_from_independence(pe({v('a')}, 0.1), singles), 1.0);
    EXPECT_DOUBLE_EQ(deviation_from_independence(pe({v('a'), v('b')}, 0.01), singles), 10.0);
    EXPECT_DOUBLE_EQ(deviation_from_independence(pe({v('a'), v('b')}, 0.0001), singles), 10.0);
    SingletonMap zero{{v('a'), 0.0}, {v('b'), 0.5}};
    EXPECT_TRUE(std::isinf(deviation_from_independence(pe({v('a'), v('b')}, 0.1), zero)));
    EXPECT_DOUBLE_EQ(deviation_from_independence(pe({v('a'), v('b')}, 0.0), zero), 1.0);
}

TEST(Combine, SingletonsGiveProduct) {
    auto q = vertices(4);
    PES pes{pe({v('a')}, 0.5), pe({v('b')}, 0.2), pe({v('c')}, 0.9), pe({v('d')}, 0.3)};
    for (auto s : kAll) EXPECT_NEAR(combine_cond_indep(pes, q, s), 0.5 * 0.2 * 0.9 * 0.3, 1e-15);
}

TEST(Combine, G4ChainRule) {
    auto g = fixtures::make_g4();
    auto q = fixtures::g4_query();
    auto pes = fixtures::exact_singletons(g, q);
    for (auto s : kAll) EXPECT_DOUBLE_EQ(combine_cond_indep(pes, q, s), 1.0 / 32);
}

TEST(Combine, OverlapUsesIntersectionEstimate) {
    auto q = vertices(3);
    PES pes{pe({v('a'), v('b')}, 0.2), pe({v('b'), v('c')}, 0.3), pe({v('a')}, 0.5), pe({v('b')}, 0.4), pe({v('c')}, 0.6)};
    CombineTrace trace;
    double s = combine_cond_indep(pes, q, SortStrategy::NdSa, &trace);
    // {a,b} first (lower s), then {b,c} conditioned on b: 0.2 * 0.3 / 0.4.
    EXPECT_NEAR(s, 0.2 * 0.3 / 0.4, 1e-15);
    double prod = 1;
    for (const auto& f : trace.factors) prod *= f.factor;
    EXPECT_NEAR(prod, s, 1e-15);
}

TEST(Combine, InputOrderDoesNotMatter) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 40; ++t) {
        auto g = fixtures::random_graph(rng);
        auto q = fixtures::random_query(rng, g, 3);
        auto cat = fixtures::full_catalog(g, 2);
        PES pes = pet_individual(q, cat);
        for (auto part : {pet_labeled_synopsis(q, cat, SynopsisClass::Chain, 2), pet_sysr(q, cat)})
            pes.insert(pes.end(), part.begin(), part.end());
        for (auto s : kAll) {
            double a = combine_cond_indep(pes, q, s);
            auto shuffled = pes;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            EXPECT_EQ(a, combine_cond_indep(shuffled, q, s));
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 1.0);
        }
        auto shuffled = pes;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_NEAR(combine_max_ent(pes, q).selectivity, combine_max_ent(shuffled, q).selectivity, 1e-12);
        EXPECT_EQ(combine_bounds(pes, q).upper, combine_bounds(shuffled, q).upper);
    }
}

TEST(Combine, IndependentFixtureMatchesOracle) {
    // Label and value are independent: every (label, value) pair appears once.
    PropertyGraph::Builder b;
    int k = 0;
    for (const char* l : {"L0", "L1"})
        for (std::int64_t a : {1, 2, 3}) b.add_vertex({"v" + std::to_string(k++), {l}, {{"a", a}}, "", ""});
    auto g = std::move(b).build();
    QueryPattern q;
    q.vertices = {{"x", {"L0"}}};
    q.props = {{"x", "a", Predicate::LEQ, Operand{Scalar{std::int64_t{2}}}}};
    auto pes = fixtures::exact_singletons(g, q);
    const double truth = fixtures::oracle_selectivity(g, extract_constraints(q));
    EXPECT_DOUBLE_EQ(truth, 1.0 / 3);
    for (auto s : kAll) EXPECT_DOUBLE_EQ(combine_cond_indep(pes, q, s), truth);
}

TEST(Combine, MaxEntSingletonsFactorize) {
    auto q = vertices(6);
    PES pes;
    double prod = 1;
    for (int i = 0; i < 6; ++i) {
        double s = 0.1 + 0.13 * i;
        pes.push_back(pe({v(static_cast<char>('a' + i))}, s));
        prod *= s;
    }
    auto r = combine_max_ent(pes, q);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.selectivity, prod, 1e-6);
    MaxEntOptions one;
    one.mps = 1;
    EXPECT_NEAR(combine_max_ent(pes, q, one).selectivity, prod, 1e-12);
}

TEST(Combine, MaxEntHandSolvable) {
    auto q = vertices(2);
    PES pes{pe({v('a')}, 0.5), pe({v('b')}, 0.5), pe({v('a'), v('b')}, 0.5)};
    auto r = combine_max_ent(pes, q);
    EXPECT_NEAR(r.selectivity, 0.5, 1e-6);
    EXPECT_TRUE(r.converged);
}

TEST(Combine, MaxEntReproducesMarginals) {
    auto q = vertices(3);
    PES pes{pe({v('a')}, 0.5), pe({v('b')}, 0.4), pe({v('c')}, 0.3), pe({v('a'), v('b')}, 0.3), pe({v('b'), v('c')}, 0.1)};
    MaxEntOptions opt;
    opt.tol = 1e-12;
    opt.max_iter = 100000;
    auto r = combine_max_ent(pes, q, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.residual, 1e-12);
    EXPECT_EQ(r.dropped, 0u);
    EXPECT_GT(r.selectivity, 0.0);
    EXPECT_LE(r.selectivity, 0.1);
}

TEST(Combine, MaxEntInfeasibleReportsResidual) {
    auto q = vertices(3);
    PES pes{pe({v('a')}, 0.2), pe({v('b')}, 0.9), pe({v('a'), v('b')}, 0.6), pe({v('c')}, 0.5)};
    MaxEntOptions opt;
    opt.max_iter = 200;
    auto r = combine_max_ent(pes, q, opt);
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.residual, 1e-3);
}

TEST(Combine, BoundsExamples) {
    auto q = vertices(3);
    auto b = combine_bounds({pe({v('a')}, 0.8), pe({v('b')}, 0.7), pe({v('c')}, 0.9)}, q);
    EXPECT_DOUBLE_EQ(b.lower, 0.4);
    EXPECT_NEAR(b.upper, 0.8 * 0.7 * 0.9, 1e-15);
    auto one = combine_bounds({pe({v('a')}, 0.3)}, q);
    EXPECT_DOUBLE_EQ(one.lower, 0.3);
    EXPECT_DOUBLE_EQ(one.upper, 0.3);
    auto two = combine_bounds({pe({v('a')}, 0.5), pe({v('b')}, 0.5)}, q);
    EXPECT_DOUBLE_EQ(two.upper, 0.25);
    // Subsets of another PE do not count towards the lower bound.
    auto nested = combine_bounds({pe({v('a')}, 0.5), pe({v('a'), v('b')}, 0.4)}, q);
    EXPECT_NEAR(nested.lower, 0.4, 1e-15);
}

TEST(Combine, BoundsGreedyBeyondLimit) {
    auto q = vertices(6);
    PES pes;
    for (int i = 0; i < 6; ++i) pes.push_back(pe({v(static_cast<char>('a' + i))}, 0.9));
    auto exact = combine_bounds(pes, q);
    auto greedy = combine_bounds(pes, q, 2);
    EXPECT_FALSE(exact.greedy);
    EXPECT_TRUE(greedy.greedy);
    EXPECT_NEAR(greedy.upper, exact.upper, 1e-15);
}

TEST(Combine, Cardinality) {
    EXPECT_NEAR(selectivity_to_cardinality(1.0 / 32, 3, 4), 2.0, 1e-12);
    EXPECT_EQ(selectivity_to_cardinality(0.0, 3, 4), 0.0);
    EXPECT_NEAR(selectivity_to_cardinality(2.98e-74, 9, 171983550), 3.93, 0.01);
}
