#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "cardest/bench.hpp"
#include "cardest/errors.hpp"
#include "fixtures.hpp"

using namespace cardest;

TEST(Bench, QError) {
    EXPECT_EQ(qerror(2, 2), 1.0);
    EXPECT_EQ(qerror(10, 1), 10.0);
    EXPECT_DOUBLE_EQ(qerror(0.4, 4.0), 10.0);
    EXPECT_TRUE(std::isinf(qerror(0, 3)));
    EXPECT_EQ(qerror(0, 0), 1.0);
}

TEST(Bench, ConfigParsing) {
    auto cs = parse_bench_configs("# comment\nbase\nrich pets=EP,c2 epests=IP(id,p) ct=condIndep(NdSa) seed=7\n\n");
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_TRUE(cs[0].estimator.pets.empty());
    EXPECT_EQ(cs[1].estimator.pets.size(), 2u);
    EXPECT_EQ(cs[1].estimator.ct.strategy, SortStrategy::NdSa);
    EXPECT_EQ(cs[1].estimator.seed, 7u);
    EXPECT_THROW(parse_bench_configs("x pets"), ParseError);
    EXPECT_THROW(parse_bench_configs("x colour=red"), ParseError);
}

TEST(Bench, GeneratorIsReproducible) {
    GeneratorSpec spec;
    spec.seed = 3;
    EXPECT_EQ(generate_graph(spec).fingerprint(), generate_graph(spec).fingerprint());
    spec.seed = 4;
    auto other = generate_graph(spec);
    spec.seed = 3;
    EXPECT_NE(generate_graph(spec).fingerprint(), other.fingerprint());
}

TEST(Bench, ZeroCorrelationKeepsPropertyIndependentOfLabel) {
    GeneratorSpec spec;
    spec.n_vertices = 4000;
    spec.n_edges = 10;
    spec.correlation = 0.0;
    spec.seed = 5;
    auto g = generate_graph(spec);
    auto l0 = *g.label_id("L0");
    auto attr = *g.key_id("attr");
    double n = 0, n_l = 0, n_v = 0, n_lv = 0;
    for (ElementId v = 0; v < g.num_vertices(); ++v) {
        const Scalar* x = g.property(v, attr);
        bool hit = x && *x == Scalar{std::int64_t{0}};
        bool lab = g.has_label(v, l0);
        n += 1;
        n_l += lab;
        n_v += hit;
        n_lv += lab && hit;
    }
    const double p = n_v / n, p_given = n_lv / n_l;
    EXPECT_NEAR(p_given, p, 4 * std::sqrt(p * (1 - p) / n_l));
}

TEST(Bench, GeneratorTiming) {
    GeneratorSpec spec;
    spec.n_vertices = 300;
    spec.n_edges = 700;
    auto start = std::chrono::steady_clock::now();
    auto g = generate_graph(spec);
    EXPECT_EQ(g.num_ids(), 1000u);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Bench, WorkloadQueriesHaveMatches) {
    auto g = generate_graph({});
    auto wl = generate_workload(g, 20, 3, true, 9);
    ASSERT_EQ(wl.size(), 20u);
    for (const auto& d : wl) EXPECT_GT(exact_document_count(g, d), 0u) << query_to_json(d);
    auto again = parse_workload([&] {
        std::string s;
        for (const auto& d : wl) {
            auto j = query_to_json(d);
            j.erase(std::remove(j.begin(), j.end(), '\n'), j.end());
            s += j + "\n";
        }
        return s;
    }());
    ASSERT_EQ(again.size(), wl.size());
    EXPECT_EQ(extract_constraints(again[3].pattern), extract_constraints(wl[3].pattern));
}

TEST(Bench, DisjunctiveOracleUsesUnion) {
    PropertyGraph::Builder b;
    b.add_vertex({"a", {"X", "Y"}, {}, "", ""});
    b.add_vertex({"b", {"X"}, {}, "", ""});
    b.add_vertex({"c", {"Y"}, {}, "", ""});
    auto g = std::move(b).build();
    auto doc = parse_query_document(R"({"vertices":[{"id":"v"}],"anyOf":[[{"id":"v","labels":["X"]},{"id":"v","labels":["Y"]}]]})");
    EXPECT_EQ(exact_document_count(g, doc), 3u);
}

TEST(Bench, ConnectedSubqueries) {
    auto doc = fixtures::job18a_document();
    auto subs = connected_subqueries(doc, 2);
    std::set<std::string> ids;
    std::size_t with_props = 0;
    for (const auto& s : subs) {
        EXPECT_TRUE(ids.insert(s.id).second) << s.id;
        EXPECT_LE(s.pattern.edges.size(), 2u);
        EXPECT_NO_THROW(s.pattern.validate());
        with_props += !s.pattern.props.empty();
        // Property groups stay whole per id.
        std::map<std::string, std::size_t> per_id;
        for (const auto& p : s.pattern.props) ++per_id[p.id];
        if (per_id.count("id8")) EXPECT_EQ(per_id["id8"], 2u);
    }
    // 4 single edges and 4 connected edge pairs.
    std::size_t plain = subs.size() - with_props;
    EXPECT_EQ(plain, 8u);
    EXPECT_GT(with_props, 0u);
}

TEST(Bench, RunWorkloadExactConfigGivesQErrorOne) {
    auto g = fixtures::make_g4();
    auto cat = fixtures::full_catalog(g);
    std::vector<QueryDocument> wl{{"g4", fixtures::g4_query(), {}}};
    auto res = run_workload(g, cat, wl, parse_bench_configs("base\nep pets=EP"), {kDefaultOracleBudget, false, 0});
    ASSERT_EQ(res.rows.size(), 2u);
    for (const auto& r : res.rows) {
        EXPECT_NEAR(r.qerror, 1.0, 1e-12);
        EXPECT_EQ(r.exact, 2.0);
        EXPECT_EQ(r.est_ms, 0.0);
    }
    auto csv = rows_to_csv(res.rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "query_id,n_edge_ids,config,exact,estimate,qerror,est_ms,oracle_ms");
    auto sum = summarize(res.rows);
    EXPECT_EQ(sum.per_config.at("base").n, 1u);
    EXPECT_NE(summary_to_text(sum).find("base"), std::string::npos);
}

TEST(Bench, BudgetSkipsQueries) {
    auto g = generate_graph({});
    auto cat = fixtures::full_catalog(g, 1);
    auto wl = generate_workload(g, 3, 3, false, 2);
    auto res = run_workload(g, cat, wl, parse_bench_configs("base"), {5, false, 0});
    EXPECT_EQ(res.skipped.size(), 3u);
    EXPECT_TRUE(res.rows.empty());
}

TEST(Bench, SummaryPartitionsAreExhaustive) {
    std::vector<BenchRow> rows;
    for (int i = 0; i < 9; ++i) rows.push_back({"q" + std::to_string(i), static_cast<std::size_t>(i % 3 + 1), "c", 1, 1.0 + i, 1.0 + i, 0, 0});
    auto s = summarize(rows);
    std::size_t total = 0;
    for (const auto& [e, st] : s.per_edges.at("c")) total += st.n;
    EXPECT_EQ(total, rows.size());
    EXPECT_EQ(s.per_config.at("c").median, 5.0);
    EXPECT_EQ(s.per_config.at("c").max, 9.0);
    for (const auto& [p, v] : s.per_config.at("c").percentiles) EXPECT_GE(v, 1.0);
}
