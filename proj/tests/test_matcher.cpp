#include <gtest/gtest.h>

#include <random>

#include "cardest/bench.hpp"
#include "cardest/errors.hpp"
#include "cardest/matcher.hpp"
#include "fixtures.hpp"

using namespace cardest;

TEST(Matcher, G4CheckConstraint) {
    auto g = fixtures::make_g4();
    const ElementId g1 = *g.find("g1"), g2 = *g.find("g2");
    EXPECT_TRUE(check_constraint(g, {{"q1", g1}}, Constraint::vertex("q1")));
    EXPECT_FALSE(check_constraint(g, {{"q1", g2}}, Constraint::vertex("q1")));
    EXPECT_TRUE(check_constraint(g, {{"q1", g1}, {"q2", g2}}, Constraint::src("q1", "q2")));
    EXPECT_FALSE(check_constraint(g, {{"q1", g1}, {"q2", g2}}, Constraint::trg("q1", "q2")));
}

TEST(Matcher, G4Query) {
    auto g = fixtures::make_g4();
    EXPECT_EQ(exact_matches(g, fixtures::g4_query()), 2u);
    EXPECT_DOUBLE_EQ(exact_selectivity(g, extract_constraints(fixtures::g4_query())), 1.0 / 32);
    QueryPattern one;
    one.vertices = {{"a", {}}};
    EXPECT_EQ(exact_matches(g, one), g.num_vertices());
}

TEST(Matcher, AgreesWithFullEnumeration) {
    std::mt19937_64 rng(2024);
    fixtures::RandomGraphSpec spec;
    spec.max_vertices = 8;
    spec.max_edges = 12;
    for (int t = 0; t < 150; ++t) {
        auto g = fixtures::random_graph(rng, spec);
        auto q = fixtures::random_query(rng, g, 2);
        auto cs = extract_constraints(q);
        EXPECT_EQ(exact_matches(g, q), fixtures::oracle_count(g, cs)) << query_to_json(q);
        // Subsets exercise partial patterns.
        ConstraintSet half;
        std::size_t i = 0;
        for (const auto& c : cs)
            if (i++ % 2 == 0) half.insert(c);
        EXPECT_EQ(count_satisfying(g, half), fixtures::oracle_count(g, half));
    }
}

TEST(Matcher, IsomorphicNeverExceedsHomomorphic) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        auto g = fixtures::random_graph(rng);
        auto q = fixtures::random_query(rng, g, 3, false);
        EXPECT_LE(exact_matches(g, q, Semantics::Isomorphic), exact_matches(g, q));
    }
    // Self-loop free 2-cycle on G4: both semantics agree.
    auto g = fixtures::make_g4();
    EXPECT_EQ(exact_matches(g, fixtures::g4_query(), Semantics::Isomorphic), 2u);
}

TEST(Matcher, BudgetGuard) {
    GeneratorSpec spec;
    spec.n_vertices = 50;
    spec.n_edges = 100;
    auto g = generate_graph(spec);
    QueryPattern q;
    q.vertices = {{"a", {}}, {"b", {}}, {"c", {}}};
    EXPECT_THROW(exact_matches(g, q, Semantics::Homomorphic, 3), OracleBudgetError);
}
