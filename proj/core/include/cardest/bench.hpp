#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardest/framework.hpp"
#include "cardest/graph.hpp"
#include "cardest/query.hpp"
#include "cardest/stats.hpp"

namespace cardest {

// max(est/real, real/est); infinity when exactly one is zero, 1 when both are.
double qerror(double est, double real);

struct BenchConfig {
    std::string name;
    EstimatorConfig estimator;
};

// One config per line: `<name> pets=EP,c2 epests=IP(id,p) ct=condIndep(MoDi)`. '#' starts a comment.
std::vector<BenchConfig> parse_bench_configs(std::string_view text);
std::vector<BenchConfig> load_bench_configs(const std::filesystem::path& path);

// JSON lines, one query document each.
std::vector<QueryDocument> parse_workload(std::string_view text);
std::vector<QueryDocument> load_workload(const std::filesystem::path& path);

// Exact count of a document; anyOf groups use union semantics.
std::uint64_t exact_document_count(const PropertyGraph& g, const QueryDocument& doc,
                                   std::uint64_t budget = kDefaultOracleBudget);

// Connected subqueries with 1..max_edges edges, each with and without its property groups.
// Property constraints of one id stay together.
std::vector<QueryDocument> connected_subqueries(const QueryDocument& doc, std::size_t max_edges);

struct BenchOptions {
    std::uint64_t oracle_budget = kDefaultOracleBudget;
    // Timings are written as 0 when false, making reports byte-identical across runs.
    bool timing = true;
    // 0 disables subquery expansion.
    std::size_t subquery_edges = 0;
};

struct BenchRow {
    std::string query_id;
    std::size_t n_edge_ids = 0;
    std::string config;
    double exact = 0.0;
    double estimate = 0.0;
    double qerror = 1.0;
    double est_ms = 0.0;
    double oracle_ms = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    // Query ids skipped because the oracle ran out of budget.
    std::vector<std::string> skipped;
};

BenchResult run_workload(const PropertyGraph& g, const StatisticsCatalog& cat, const std::vector<QueryDocument>& queries,
                         const std::vector<BenchConfig>& configs, const BenchOptions& opt = {});

std::string rows_to_csv(const std::vector<BenchRow>& rows);

struct QErrorStats {
    std::size_t n = 0;
    double median = 1.0;
    double max = 1.0;
    // p50, p90, p95, p99.
    std::map<int, double> percentiles;
    double median_ms = 0.0;
    double max_ms = 0.0;
};

struct QErrorSummary {
    std::map<std::string, QErrorStats> per_config;
    // config -> edge count -> stats.
    std::map<std::string, std::map<std::size_t, QErrorStats>> per_edges;
};

QErrorSummary summarize(const std::vector<BenchRow>& rows);
std::string summary_to_text(const QErrorSummary& s);

struct GeneratorSpec {
    std::size_t n_vertices = 100;
    std::size_t n_edges = 300;
    std::size_t vertex_labels = 4;
    std::size_t edge_labels = 3;
    // Zipf exponent for endpoint choice; 0 is uniform.
    double degree_skew = 0.0;
    // Probability that a vertex's `attr` value is tied to its label.
    double correlation = 0.0;
    std::size_t n_values = 10;
    std::uint64_t seed = 1;
};

PropertyGraph generate_graph(const GeneratorSpec& spec);

// Random connected queries grown from walks in g, so every query has at least one match.
std::vector<QueryDocument> generate_workload(const PropertyGraph& g, std::size_t n_queries, std::size_t max_edges,
                                             bool with_props, std::uint64_t seed);

}  // namespace cardest
