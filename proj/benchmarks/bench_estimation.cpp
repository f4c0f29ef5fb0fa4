#include <benchmark/benchmark.h>

#include "cardest/bench.hpp"
#include "cardest/framework.hpp"

using namespace cardest;

namespace {

PropertyGraph make_graph(std::size_t vertices) {
    GeneratorSpec spec;
    spec.n_vertices = vertices;
    spec.n_edges = vertices * 3;
    spec.degree_skew = 1.0;
    spec.correlation = 0.5;
    spec.seed = 1;
    return generate_graph(spec);
}

StatsConfig rich_stats() {
    StatsConfig cfg;
    cfg.synopses = parse_synopsis_list("edge,chain2,sstar2,tstar2");
    cfg.cs_max_entries = 10000;
    cfg.sketch_buckets = 8;
    cfg.samples = {{SamplePattern::Id, 0.1}};
    cfg.histograms = {HistogramSpec{"score"}, HistogramSpec{"attr"}};
    return cfg;
}

QueryPattern chain_query(std::size_t edges) {
    QueryPattern q;
    q.vertices.push_back({"v0", {"L0"}});
    for (std::size_t i = 0; i < edges; ++i) {
        q.vertices.push_back({"v" + std::to_string(i + 1), {}});
        q.edges.push_back({"e" + std::to_string(i), "v" + std::to_string(i), "v" + std::to_string(i + 1), {"R0"}});
    }
    return q;
}

void BM_BuildCatalog(benchmark::State& state) {
    auto g = make_graph(static_cast<std::size_t>(state.range(0)));
    const auto cfg = rich_stats();
    for (auto _ : state) benchmark::DoNotOptimize(build_catalog(g, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_ids()));
}
BENCHMARK(BM_BuildCatalog)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExactMatches(benchmark::State& state) {
    auto g = make_graph(500);
    auto q = chain_query(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(exact_matches(g, q));
}
BENCHMARK(BM_ExactMatches)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_Estimate(benchmark::State& state, const char* pets, const char* ct) {
    auto g = make_graph(500);
    auto cat = build_catalog(g, rich_stats());
    auto q = chain_query(static_cast<std::size_t>(state.range(0)));
    auto cfg = make_config(pets, "IP(id,a)", ct);
    for (auto _ : state) benchmark::DoNotOptimize(estimate(q, &g, cat, cfg));
}
BENCHMARK_CAPTURE(BM_Estimate, base_condIndep, "", "condIndep(MoDi)")->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Estimate, rich_condIndep, "EP,c2,s2,t2,SysR,CS,BS", "condIndep(MoDi)")
    ->DenseRange(1, 4)
    ->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Estimate, rich_maxEnt, "EP,c2,s2,t2,SysR,CS,BS", "maxEnt")->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Estimate, rich_bounds, "EP,c2,s2,t2,SysR,CS,BS", "bounds")->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_WanderJoin(benchmark::State& state) {
    auto g = make_graph(1000);
    auto q = chain_query(2);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(pet_wander_join(q, g, static_cast<std::size_t>(state.range(0)), ++seed));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WanderJoin)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_MaxEntSingletons(benchmark::State& state) {
    QueryPattern q;
    PES pes;
    for (int i = 0; i < state.range(0); ++i) {
        std::string id = "v" + std::to_string(i);
        q.vertices.push_back({id, {}});
        pes.push_back({{Constraint::vertex(id)}, 0.1 + 0.05 * (i % 10), Technique::Exact, "x"});
    }
    for (int i = 0; i + 1 < state.range(0); i += 2)
        pes.push_back({{Constraint::vertex(q.vertices[static_cast<std::size_t>(i)].id), Constraint::vertex(q.vertices[static_cast<std::size_t>(i) + 1].id)},
                       0.05, Technique::Exact, "x"});
    for (auto _ : state) benchmark::DoNotOptimize(combine_max_ent(pes, q));
}
BENCHMARK(BM_MaxEntSingletons)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
