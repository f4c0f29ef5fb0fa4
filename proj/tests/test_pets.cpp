#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cardest/combine.hpp"
#include "cardest/errors.hpp"
#include "cardest/matcher.hpp"
#include "cardest/pets.hpp"
#include "fixtures.hpp"

using namespace cardest;

namespace {

StatisticsCatalog basic_only(const PropertyGraph& g) {
    StatisticsCatalog c;
    c.basic = build_basic(g);
    return c;
}

Operand num(std::int64_t v) { return Operand{Scalar{v}}; }

const PartialEstimate* find_pe(const PES& pes, const ConstraintSet& cs) {
    for (const auto& pe : pes)
        if (pe.constraints == cs) return &pe;
    return nullptr;
}

// Circulant graph i -> i+1, i -> i+2: every vertex has in- and out-degree 2.
PropertyGraph circulant(int n) {
    PropertyGraph::Builder b;
    for (int i = 0; i < n; ++i) b.add_vertex({"v" + std::to_string(i), {}, {}, "", ""});
    for (int i = 0; i < n; ++i)
        for (int d : {1, 2})
            b.add_edge({"e" + std::to_string(i) + "_" + std::to_string(d), {}, {}, "v" + std::to_string(i),
                        "v" + std::to_string((i + d) % n)});
    return std::move(b).build();
}

QueryPattern chain_query(int n) {
    QueryPattern q;
    for (int i = 0; i <= n; ++i) q.vertices.push_back({"v" + std::to_string(i), {}});
    for (int i = 0; i < n; ++i) q.edges.push_back({"e" + std::to_string(i), "v" + std::to_string(i), "v" + std::to_string(i + 1), {}});
    return q;
}

}  // namespace

TEST(Pets, TagParsing) {
    auto list = parse_pet_list("EP,c2,s3,t2,SysR,CS,BS,S(id,0.5),WJ(500),MDH,defaults");
    ASSERT_EQ(list.size(), 11u);
    EXPECT_EQ(list[1].kind, PetKind::Chain);
    EXPECT_EQ(list[1].size, 2);
    EXPECT_EQ(list[7].kind, PetKind::Sampling);
    EXPECT_DOUBLE_EQ(*list[7].sample_probability, 0.5);
    EXPECT_EQ(list[8].walks, 500u);
    EXPECT_TRUE(parse_pet_list("{}").empty());
    EXPECT_THROW(parse_pet_tag("XYZ"), ConfigError);
    EXPECT_THROW(parse_pet_tag("c0"), ConfigError);
}

TEST(Pets, IndividualG4) {
    auto g = fixtures::make_g4();
    auto pes = pet_individual(fixtures::g4_query(), basic_only(g));
    EXPECT_EQ(pes.size(), 5u);
    EXPECT_DOUBLE_EQ(find_pe(pes, {Constraint::vertex("q1")})->selectivity, 0.5);
    EXPECT_DOUBLE_EQ(find_pe(pes, {Constraint::edge("q2")})->selectivity, 0.5);
    EXPECT_DOUBLE_EQ(find_pe(pes, {Constraint::src("q1", "q2")})->selectivity, 0.125);
    // Every singleton is exact on G4.
    for (const auto& pe : pes) EXPECT_DOUBLE_EQ(pe.selectivity, fixtures::oracle_selectivity(g, pe.constraints));
}

TEST(Pets, DefaultValues) {
    EXPECT_DOUBLE_EQ(default_selectivity(Predicate::EQ), 0.1);
    EXPECT_DOUBLE_EQ(default_selectivity(Predicate::NEQ), 0.9);
    EXPECT_DOUBLE_EQ(default_selectivity(Predicate::LT), 1.0 / 3);
    StatisticsCatalog empty;
    auto pe = individual_estimate(Constraint::prop_value("a", "k", Predicate::EQ, num(1)), empty);
    EXPECT_DOUBLE_EQ(pe.selectivity, 0.1);
    EXPECT_EQ(pe.technique, Technique::Default);
}

TEST(Pets, PropValueFallbackChain) {
    std::mt19937_64 rng(77);
    auto g = fixtures::random_graph(rng);
    auto c = Constraint::prop_value("x", "a", Predicate::EQ, num(1));
    const double truth = fixtures::oracle_selectivity(g, {c});

    StatsConfig cfg;
    cfg.exact_props = {{"a", Predicate::EQ, num(1)}};
    auto pe = individual_estimate(c, build_catalog(g, cfg));
    EXPECT_EQ(pe.technique, Technique::Exact);
    EXPECT_DOUBLE_EQ(pe.selectivity, truth);

    cfg.exact_props.clear();
    cfg.samples = {{SamplePattern::Id, 1.0}};
    pe = individual_estimate(c, build_catalog(g, cfg));
    EXPECT_EQ(pe.technique, Technique::Sampling);
    EXPECT_NEAR(pe.selectivity, truth, 1e-12);

    cfg.histograms = {{"a", HistogramKind::EquiWidth, 16}};
    pe = individual_estimate(c, build_catalog(g, cfg));
    EXPECT_EQ(pe.technique, Technique::Histogram);

    pe = individual_estimate(c, build_catalog(g, cfg), true);
    EXPECT_EQ(pe.technique, Technique::Default);
}

TEST(Pets, EdgeSynopsisG4) {
    auto g = fixtures::make_g4();
    auto pes = pet_labeled_synopsis(fixtures::g4_query(), fixtures::full_catalog(g), SynopsisClass::Edge, 1);
    ASSERT_EQ(pes.size(), 1u);
    EXPECT_DOUBLE_EQ(pes[0].selectivity, 2.0 / 64);
    EXPECT_EQ(pes[0].constraints, extract_constraints(fixtures::g4_query()));
}

TEST(Pets, MarkovChainOnRegularGraph) {
    auto g = circulant(7);
    StatsConfig cfg;
    cfg.synopses = {{SynopsisClass::Chain, 2}};
    auto cat = build_catalog(g, cfg);
    auto q = chain_query(3);
    auto pes = pet_labeled_synopsis(q, cat, SynopsisClass::Chain, 2);
    auto full = find_pe(pes, extract_constraints(q));
    ASSERT_NE(full, nullptr);
    EXPECT_NEAR(full->selectivity, exact_selectivity(g, extract_constraints(q)), 1e-15);
    // Sizes within the synopsis are direct lookups.
    auto q2 = chain_query(2);
    auto p2 = pet_labeled_synopsis(q2, cat, SynopsisClass::Chain, 2);
    EXPECT_DOUBLE_EQ(find_pe(p2, extract_constraints(q2))->selectivity, exact_selectivity(g, extract_constraints(q2)));
}

TEST(Pets, SynopsisPEsAreExactWithinStoredSize) {
    std::mt19937_64 rng(88);
    for (int t = 0; t < 25; ++t) {
        auto g = fixtures::random_graph(rng);
        auto cat = fixtures::full_catalog(g, 2);
        auto q = fixtures::random_query(rng, g, 3, false);
        for (auto [cls, size] : {std::pair{SynopsisClass::Edge, 1}, std::pair{SynopsisClass::Chain, 2},
                                 std::pair{SynopsisClass::SourceStar, 2}, std::pair{SynopsisClass::TargetStar, 2}}) {
            for (const auto& pe : pet_labeled_synopsis(q, cat, cls, size)) {
                // Longer chains go through the Markov extension.
                if (ids_of(pe.constraints).size() > 5) continue;
                EXPECT_NEAR(pe.selectivity, fixtures::oracle_selectivity(g, pe.constraints), 1e-15) << pe.tag;
            }
        }
    }
}

TEST(Pets, SysRFunctionalStarIsExact) {
    PropertyGraph::Builder b;
    for (int i = 0; i < 4; ++i) b.add_vertex({"c" + std::to_string(i), {"C"}, {}, "", ""});
    for (int i = 0; i < 4; ++i) b.add_vertex({"x" + std::to_string(i), {"X"}, {}, "", ""});
    for (int i = 0; i < 4; ++i) {
        b.add_edge({"a" + std::to_string(i), {"a"}, {}, "c" + std::to_string(i), "x" + std::to_string(i)});
        b.add_edge({"b" + std::to_string(i), {"b"}, {}, "c" + std::to_string(i), "x" + std::to_string((i + 1) % 4)});
    }
    auto g = std::move(b).build();
    QueryPattern q;
    q.vertices = {{"c", {"C"}}, {"x", {"X"}}, {"y", {"X"}}};
    q.edges = {{"e1", "c", "x", {"a"}}, {"e2", "c", "y", {"b"}}};
    StatsConfig cfg;
    auto pes = pet_sysr(q, build_catalog(g, cfg));
    auto full = find_pe(pes, extract_constraints(q));
    ASSERT_NE(full, nullptr);
    EXPECT_DOUBLE_EQ(full->selectivity, exact_selectivity(g, extract_constraints(q)));
}

TEST(Pets, SysRHandEvaluation) {
    // Two centers, each with two a-edges and two b-edges: n=4, distinct=2 per label.
    PropertyGraph::Builder b;
    for (const char* v : {"c1", "c2", "l"}) b.add_vertex({v, {}, {}, "", ""});
    int k = 0;
    for (const char* c : {"c1", "c2"})
        for (const char* l : {"a", "a", "b", "b"}) b.add_edge({"e" + std::to_string(k++), {l}, {}, c, "l"});
    auto g = std::move(b).build();
    QueryPattern q;
    q.vertices = {{"c", {}}, {"x", {}}, {"y", {}}};
    q.edges = {{"e1", "c", "x", {"a"}}, {"e2", "c", "y", {"b"}}};
    auto cat = build_catalog(g, {});
    auto pes = pet_sysr(q, cat);
    auto full = find_pe(pes, extract_constraints(q));
    ASSERT_NE(full, nullptr);
    EXPECT_NEAR(selectivity_to_cardinality(full->selectivity, 5, g.num_ids()), 8.0, 1e-9);
    EXPECT_EQ(exact_matches(g, q), 8u);

    // A label on known elements that never forms this edge pattern.
    q.edges[1].labels = {"zzz"};
    PropertyGraph::Builder b2;
    b2.add_vertex({"p", {}, {}, "", ""});
    b2.add_vertex({"r", {"zzz"}, {}, "", ""});
    b2.add_edge({"pe", {"a"}, {}, "p", "p"});
    auto g2 = std::move(b2).build();
    auto zero = pet_sysr(q, build_catalog(g2, {}));
    auto z = find_pe(zero, extract_constraints(q));
    ASSERT_NE(z, nullptr);
    EXPECT_EQ(z->selectivity, 0.0);
}

TEST(Pets, BoundSketchSingleBucketFormula) {
    PropertyGraph::Builder b;
    for (int i = 0; i < 6; ++i) b.add_vertex({"v" + std::to_string(i), {}, {}, "", ""});
    // v0 is a hub: in-degree 3, out-degree 2.
    int k = 0;
    for (int s : {1, 2, 3}) b.add_edge({"e" + std::to_string(k++), {}, {}, "v" + std::to_string(s), "v0"});
    for (int t : {4, 5}) b.add_edge({"e" + std::to_string(k++), {}, {}, "v0", "v" + std::to_string(t)});
    b.add_edge({"e" + std::to_string(k++), {}, {}, "v4", "v5"});
    auto g = std::move(b).build();
    StatsConfig cfg;
    cfg.sketch_buckets = 1;
    auto cat = build_catalog(g, cfg);
    // x <- c -> y star at c, join on the source role: |ep| = 6, max out-degree 2.
    QueryPattern q;
    q.vertices = {{"c", {}}, {"x", {}}, {"y", {}}};
    q.edges = {{"e1", "c", "x", {}}, {"e2", "c", "y", {}}};
    auto pes = pet_bound_sketch(q, cat);
    auto full = find_pe(pes, extract_constraints(q));
    ASSERT_NE(full, nullptr);
    const double n5 = std::pow(static_cast<double>(g.num_ids()), 5);
    EXPECT_DOUBLE_EQ(full->selectivity * n5, 6.0 * 2.0);
    EXPECT_GE(full->selectivity, exact_selectivity(g, extract_constraints(q)));
}

TEST(Pets, BoundSketchIsUpperBound) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 60; ++t) {
        auto g = fixtures::random_graph(rng);
        auto cat = fixtures::full_catalog(g, 1);
        auto q = fixtures::random_query(rng, g, 3, false);
        for (const auto& pe : pet_bound_sketch(q, cat))
            EXPECT_GE(pe.selectivity * (1 + 1e-12), fixtures::oracle_selectivity(g, pe.constraints));
    }
}

TEST(Pets, CharSetsFunctionalFixtureIsExact) {
    PropertyGraph::Builder b;
    for (int i = 0; i < 5; ++i) b.add_vertex({"v" + std::to_string(i), {}, {{"k", std::int64_t{1}}}, "", ""});
    for (int i = 0; i < 5; ++i) {
        b.add_edge({"a" + std::to_string(i), {"a"}, {}, "v" + std::to_string(i), "v" + std::to_string((i + 1) % 5)});
        b.add_edge({"b" + std::to_string(i), {"b"}, {}, "v" + std::to_string(i), "v" + std::to_string((i + 3) % 5)});
    }
    auto g = std::move(b).build();
    StatsConfig cfg;
    cfg.cs_max_entries = 100;
    auto cat = build_catalog(g, cfg);
    QueryPattern q;
    q.vertices = {{"c", {}}, {"x", {}}, {"y", {}}};
    q.edges = {{"e1", "c", "x", {"a"}}, {"e2", "c", "y", {"b"}}};
    q.props = {{"c", "k", Predicate::EQ, num(1)}};
    auto pes = pet_char_sets(q, cat);
    ASSERT_FALSE(pes.empty());
    bool saw_full = false;
    for (const auto& pe : pes) {
        EXPECT_NEAR(pe.selectivity, fixtures::oracle_selectivity(g, pe.constraints), 1e-15);
        saw_full = saw_full || pe.constraints.count(Constraint::has_key("c", "k"));
    }
    EXPECT_TRUE(saw_full);

    q.edges[1].labels = {"nowhere"};
    for (const auto& pe : pet_char_sets(q, cat))
        if (pe.constraints.count(Constraint::has_label("e2", "nowhere"))) EXPECT_EQ(pe.selectivity, 0.0);
}

TEST(Pets, SamplingExhaustiveIsExact) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 30; ++t) {
        auto g = fixtures::random_graph(rng);
        auto cat = fixtures::full_catalog(g);
        auto q = fixtures::random_query(rng, g, 3);
        for (auto pt : {SamplePattern::Id, SamplePattern::EdgePattern})
            for (const auto& pe : pet_sampling(q, cat, pt))
                EXPECT_NEAR(pe.selectivity, fixtures::oracle_selectivity(g, pe.constraints), 1e-12) << pe.tag;
    }
}

TEST(Pets, SamplingUnbiasedOverSeeds) {
    std::mt19937_64 rng(8);
    fixtures::RandomGraphSpec spec;
    spec.max_vertices = 30;
    spec.max_edges = 30;
    PropertyGraph g;
    do g = fixtures::random_graph(rng, spec);
    while (g.num_ids() < 30);
    QueryPattern q;
    q.vertices = {{"x", {}}};
    q.props = {{"x", "a", Predicate::LT, num(2)}};
    StatisticsCatalog cat;
    cat.basic = build_basic(g);
    double sum = 0, sq = 0;
    const int runs = 200;
    ConstraintSet target;
    for (int seed = 0; seed < runs; ++seed) {
        cat.samples = {build_sample(g, SamplePattern::Id, 0.5, static_cast<std::uint64_t>(seed))};
        auto pes = pet_sampling(q, cat, SamplePattern::Id);
        ASSERT_EQ(pes.size(), 1u);
        target = pes[0].constraints;
        sum += pes[0].selectivity;
        sq += pes[0].selectivity * pes[0].selectivity;
    }
    const double mean = sum / runs, var = sq / runs - mean * mean;
    const double se = std::sqrt(var / runs);
    EXPECT_LE(std::abs(mean - fixtures::oracle_selectivity(g, target)), 3 * se + 1e-12);
}

TEST(Pets, WanderJoinSingleEdgeAndG4Chain) {
    auto g = fixtures::make_g4();
    auto one = pet_wander_join(fixtures::g4_query(), g, 100, 1);
    ASSERT_TRUE(one.has_value());
    // Every first step is a match drawn with probability 1/|E|.
    EXPECT_DOUBLE_EQ(one->selectivity, 1.0 / 32);

    auto q = chain_query(2);
    double total = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto pe = pet_wander_join(q, g, 10000, seed);
        ASSERT_TRUE(pe.has_value());
        total += selectivity_to_cardinality(pe->selectivity, 5, g.num_ids());
    }
    EXPECT_NEAR(total / 30, 2.0, 0.1);
    EXPECT_EQ(exact_matches(g, q), 2u);
}

TEST(Pets, WanderJoinNoPlanAndNoHits) {
    auto g = fixtures::make_g4();
    QueryPattern split;
    split.vertices = {{"a", {}}, {"b", {}}, {"c", {}}, {"d", {}}};
    split.edges = {{"e1", "a", "b", {}}, {"e2", "c", "d", {}}};
    EXPECT_TRUE(wander_join_plan(split).empty());
    EXPECT_FALSE(pet_wander_join(split, g, 10, 1).has_value());

    auto q = fixtures::g4_query();
    q.edges[0].labels = {"missing"};
    auto pe = pet_wander_join(q, g, 10, 1);
    ASSERT_TRUE(pe.has_value());
    EXPECT_EQ(pe->selectivity, 0.0);
    EXPECT_TRUE(pe->low_confidence);
}

TEST(Pets, MDHistogramGrid) {
    PropertyGraph::Builder b;
    for (int x = 0; x < 10; ++x)
        for (int y = 0; y < 10; ++y)
            b.add_vertex({"v" + std::to_string(x) + "_" + std::to_string(y), {}, {{"x", std::int64_t{x}}, {"y", std::int64_t{y}}}, "", ""});
    auto g = std::move(b).build();
    StatsConfig cfg;
    cfg.md_histograms = {{{"x", "y"}, 2}};
    auto cat = build_catalog(g, cfg);
    auto run = [&](std::vector<PropConstraint> props) {
        QueryPattern q;
        q.vertices = {{"v", {}}};
        q.props = std::move(props);
        auto pes = pet_md_histogram(q, cat);
        EXPECT_EQ(pes.size(), 1u);
        return pes.empty() ? -1.0 : pes[0].selectivity;
    };
    // Lower-left cell holds x, y in 0..4: 25 of 100 elements.
    EXPECT_NEAR(run({{"v", "x", Predicate::LEQ, num(4)}, {"v", "y", Predicate::LEQ, num(4)}}), 0.25, 1e-12);
    // Point query inside a 25-element cell with 5 distinct values per axis.
    EXPECT_NEAR(run({{"v", "x", Predicate::EQ, num(2)}, {"v", "y", Predicate::EQ, num(3)}}), 25.0 / 25 / 100, 1e-12);
    EXPECT_EQ(run({{"v", "x", Predicate::EQ, num(100)}, {"v", "y", Predicate::EQ, num(3)}}), 0.0);

    QueryPattern uncovered;
    uncovered.vertices = {{"v", {}}};
    uncovered.props = {{"v", "z", Predicate::EQ, num(1)}};
    EXPECT_TRUE(pet_md_histogram(uncovered, cat).empty());
}

TEST(Pets, EveryPEIsWellFormed) {
    std::mt19937_64 rng(123);
    for (int t = 0; t < 40; ++t) {
        auto g = fixtures::random_graph(rng);
        auto cat = fixtures::full_catalog(g, 2);
        cat.md_histograms.push_back(build_md_histogram(g, {"a", "b"}, 2));
        auto q = fixtures::random_query(rng, g, 4);
        auto all = extract_constraints(q);
        PES pes = pet_individual(q, cat);
        for (auto part : {pet_labeled_synopsis(q, cat, SynopsisClass::Edge, 1), pet_labeled_synopsis(q, cat, SynopsisClass::Chain, 2),
                          pet_labeled_synopsis(q, cat, SynopsisClass::SourceStar, 2), pet_labeled_synopsis(q, cat, SynopsisClass::TargetStar, 2),
                          pet_sysr(q, cat), pet_bound_sketch(q, cat), pet_char_sets(q, cat), pet_sampling(q, cat, SamplePattern::Id),
                          pet_sampling(q, cat, SamplePattern::EdgePattern), pet_md_histogram(q, cat)})
            pes.insert(pes.end(), part.begin(), part.end());
        if (auto wj = pet_wander_join(q, g, 50, 3)) pes.push_back(*wj);
        for (const auto& pe : pes) {
            EXPECT_FALSE(pe.constraints.empty());
            EXPECT_TRUE(is_subset(pe.constraints, all)) << pe.tag;
            EXPECT_GE(pe.selectivity, 0.0);
            EXPECT_LE(pe.selectivity, 1.0);
        }
    }
}
