#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "cardest/bench.hpp"
#include "cardest/errors.hpp"
#include "cardest/framework.hpp"
#include "cardest/graph.hpp"
#include "cardest/matcher.hpp"
#include "cardest/stats.hpp"

using namespace cardest;

namespace {

Scalar parse_literal(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    try {
        std::size_t used = 0;
        long long i = std::stoll(s, &used);
        if (used == s.size()) return static_cast<std::int64_t>(i);
        double d = std::stod(s, &used);
        if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    return s;
}

std::pair<std::string, std::string> split_at(const std::string& s, char sep) {
    auto p = s.find(sep);
    if (p == std::string::npos) return {s, ""};
    return {s.substr(0, p), s.substr(p + 1)};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

void warn_if_stale(const StatisticsCatalog& cat, const PropertyGraph& g) {
    if (auto w = stale_catalog_warning(cat, g)) std::cerr << "warning: " << *w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cardinality estimation for property-graph query patterns"};
    app.require_subcommand(1);

    // stats build
    auto* stats = app.add_subcommand("stats", "Statistics catalogs");
    stats->require_subcommand(1);
    auto* build = stats->add_subcommand("build", "Build a statistics catalog from a graph");
    std::string graph_dir, out_path, synopses = "edge,chain2,sstar2,tstar2";
    bool no_sysr = false, cs_in = false;
    std::size_t cs_entries = 10000;
    std::uint32_t sketch_buckets = 16;
    std::vector<std::string> samples, histograms, md_histograms, exact_eq;
    std::uint64_t seed = 42;
    build->add_option("--graph", graph_dir, "Graph directory (vertices.jsonl, edges.jsonl)")->required();
    build->add_option("--out", out_path, "Catalog file")->required();
    build->add_option("--synopses", synopses, "Labeled synopses, e.g. edge,chain2,sstar3,tstar2")->capture_default_str();
    build->add_flag("--no-sysr", no_sysr, "Skip System R edge-pattern statistics");
    build->add_option("--cs", cs_entries, "Characteristic set budget, 0 disables")->capture_default_str();
    build->add_flag("--cs-in", cs_in, "Also build incoming characteristic sets");
    build->add_option("--sketch-buckets", sketch_buckets, "Bound sketch buckets, 0 disables")->capture_default_str();
    build->add_option("--sample", samples, "Sample as pattern:probability (id, vertex, ep)");
    build->add_option("--histogram", histograms, "Histogram as key[:buckets[:equi_width|equi_depth]]");
    build->add_option("--md-histogram", md_histograms, "Grid histogram as key1,key2[:buckets]");
    build->add_option("--exact-eq", exact_eq, "Store the exact count of key=value");
    build->add_option("--seed", seed, "Seed for samples and sketches")->capture_default_str();

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate the cardinality of a query");
    std::string stats_path, query_path, pets, epests, ct = "condIndep(MoDi)";
    bool as_json = false;
    est->add_option("--graph", graph_dir, "Graph directory; needed for WJ");
    est->add_option("--stats", stats_path, "Catalog file")->required();
    est->add_option("--query", query_path, "Query document (JSON)")->required();
    est->add_option("--pets", pets, "Partial estimation techniques, e.g. EP,s3,CS");
    est->add_option("--epests", epests, "PES extensions, e.g. IP(id,a)");
    est->add_option("--ct", ct, "Combination technique")->capture_default_str();
    est->add_option("--seed", seed, "Seed for randomized techniques")->capture_default_str();
    est->add_flag("--json", as_json, "Print the report as JSON");

    // exact
    auto* ex = app.add_subcommand("exact", "Count matches exactly");
    std::uint64_t budget = kDefaultOracleBudget;
    ex->add_option("--graph", graph_dir, "Graph directory")->required();
    ex->add_option("--query", query_path, "Query document (JSON)")->required();
    ex->add_option("--budget", budget, "Search node budget")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Run a workload and report q-errors");
    std::string workload, configs;
    bool no_timing = false, summary = false;
    std::size_t subqueries = 0;
    bench->add_option("--graph", graph_dir, "Graph directory")->required();
    bench->add_option("--stats", stats_path, "Catalog file")->required();
    bench->add_option("--workload", workload, "Query documents, one JSON object per line")->required();
    bench->add_option("--configs", configs, "Estimator configurations, one per line")->required();
    bench->add_option("--out", out_path, "CSV report, - for stdout")->required();
    bench->add_option("--budget", budget, "Oracle node budget per query")->capture_default_str();
    bench->add_option("--subqueries", subqueries, "Expand connected subqueries up to this many edges");
    bench->add_flag("--no-timing", no_timing, "Write 0 for timings");
    bench->add_flag("--summary", summary, "Print a q-error summary to stderr");

    // generate
    auto* gen = app.add_subcommand("generate", "Synthetic graphs and workloads");
    gen->require_subcommand(1);
    auto* gen_graph = gen->add_subcommand("graph", "Generate a graph directory");
    GeneratorSpec spec;
    gen_graph->add_option("--out", out_path, "Output directory")->required();
    gen_graph->add_option("--vertices", spec.n_vertices)->capture_default_str();
    gen_graph->add_option("--edges", spec.n_edges)->capture_default_str();
    gen_graph->add_option("--vertex-labels", spec.vertex_labels)->capture_default_str();
    gen_graph->add_option("--edge-labels", spec.edge_labels)->capture_default_str();
    gen_graph->add_option("--skew", spec.degree_skew, "Zipf exponent of endpoint choice")->capture_default_str();
    gen_graph->add_option("--correlation", spec.correlation, "Label/property and label/label correlation")->capture_default_str();
    gen_graph->add_option("--values", spec.n_values, "Distinct values of attr")->capture_default_str();
    gen_graph->add_option("--seed", spec.seed)->capture_default_str();
    auto* gen_work = gen->add_subcommand("workload", "Generate a query workload from a graph");
    std::size_t n_queries = 50, max_edges = 3;
    bool with_props = false;
    gen_work->add_option("--graph", graph_dir, "Graph directory")->required();
    gen_work->add_option("--out", out_path, "JSON lines file")->required();
    gen_work->add_option("--queries", n_queries)->capture_default_str();
    gen_work->add_option("--max-edges", max_edges)->capture_default_str();
    gen_work->add_flag("--props", with_props, "Add property constraints");
    gen_work->add_option("--seed", seed)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            auto g = load_graph_dir(graph_dir);
            StatsConfig cfg;
            cfg.synopses = parse_synopsis_list(synopses);
            cfg.sysr = !no_sysr;
            cfg.cs_max_entries = cs_entries;
            cfg.cs_in = cs_in;
            cfg.sketch_buckets = sketch_buckets;
            cfg.seed = seed;
            for (const auto& s : samples) {
                auto [pt, pr] = split_at(s, ':');
                cfg.samples.push_back({parse_sample_pattern(pt), pr.empty() ? 0.1 : std::stod(pr)});
            }
            for (const auto& h : histograms) {
                auto [key, rest] = split_at(h, ':');
                auto [buckets, kind] = split_at(rest, ':');
                HistogramSpec hs{key, HistogramKind::EquiDepth, 16};
                if (!buckets.empty()) hs.buckets = std::stoul(buckets);
                if (kind == "equi_width") hs.kind = HistogramKind::EquiWidth;
                else if (!kind.empty() && kind != "equi_depth") throw ConfigError("unknown histogram kind '" + kind + "'");
                cfg.histograms.push_back(hs);
            }
            for (const auto& h : md_histograms) {
                auto [keys, buckets] = split_at(h, ':');
                MDHistogramSpec ms;
                std::string cur;
                for (char c : keys + ",") {
                    if (c != ',') {
                        cur += c;
                    } else if (!cur.empty()) {
                        ms.keys.push_back(cur);
                        cur.clear();
                    }
                }
                if (!buckets.empty()) ms.buckets = std::stoul(buckets);
                cfg.md_histograms.push_back(ms);
            }
            for (const auto& e : exact_eq) {
                auto [key, value] = split_at(e, '=');
                cfg.exact_props.push_back({key, Predicate::EQ, Operand{parse_literal(value)}});
            }
            save_catalog(build_catalog(g, cfg), out_path);
            std::cerr << "catalog written to " << out_path << " (" << g.num_vertices() << " vertices, " << g.num_edges()
                      << " edges)\n";
        } else if (est->parsed()) {
            auto cat = load_catalog(stats_path);
            auto doc = load_query_document(query_path);
            auto cfg = make_config(pets, epests, ct);
            cfg.seed = seed;
            std::optional<PropertyGraph> g;
            if (!graph_dir.empty()) {
                g = load_graph_dir(graph_dir);
                warn_if_stale(cat, *g);
            }
            auto rep = estimate_document(doc, g ? &*g : nullptr, cat, cfg);
            std::cout << (as_json ? report_to_json(rep) + "\n" : report_to_text(rep));
        } else if (ex->parsed()) {
            auto g = load_graph_dir(graph_dir);
            auto doc = load_query_document(query_path);
            auto n = exact_document_count(g, doc, budget);
            double space = selectivity_to_cardinality(1.0, doc.pattern.size(), g.num_ids());
            std::printf("matches      %llu\nselectivity  %.17g\n", static_cast<unsigned long long>(n),
                        space > 0 ? static_cast<double>(n) / space : 0.0);
        } else if (bench->parsed()) {
            auto g = load_graph_dir(graph_dir);
            auto cat = load_catalog(stats_path);
            warn_if_stale(cat, g);
            BenchOptions opt;
            opt.oracle_budget = budget;
            opt.timing = !no_timing;
            opt.subquery_edges = subqueries;
            auto res = run_workload(g, cat, load_workload(workload), load_bench_configs(configs), opt);
            write_text(out_path, rows_to_csv(res.rows));
            for (const auto& id : res.skipped) std::cerr << "skipped " << id << ": oracle budget exceeded\n";
            if (summary) std::cerr << summary_to_text(summarize(res.rows));
        } else if (gen_graph->parsed()) {
            save_graph_dir(generate_graph(spec), out_path);
        } else if (gen_work->parsed()) {
            auto g = load_graph_dir(graph_dir);
            std::string text;
            for (const auto& d : generate_workload(g, n_queries, max_edges, with_props, seed)) text += query_to_json(d) + "\n";
            write_text(out_path, text);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
