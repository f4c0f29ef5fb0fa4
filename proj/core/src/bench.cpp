#include "cardest/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cardest/errors.hpp"

namespace cardest {

namespace {

constexpr std::size_t kMaxInclusionTerms = 4096;

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void apply_alternative(QueryPattern& q, const Alternative& alt) {
    auto add = [&](std::vector<std::string>& labels) {
        for (const auto& l : alt.labels)
            if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    };
    for (auto& v : q.vertices)
        if (v.id == alt.id) add(v.labels);
    for (auto& e : q.edges)
        if (e.id == alt.id) add(e.labels);
    q.props.insert(q.props.end(), alt.props.begin(), alt.props.end());
}

QErrorStats stats_of(std::vector<double> q, std::vector<double> ms) {
    QErrorStats s;
    s.n = q.size();
    if (q.empty()) return s;
    std::sort(q.begin(), q.end());
    std::sort(ms.begin(), ms.end());
    auto median = [](const std::vector<double>& v) {
        const auto n = v.size();
        return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    };
    s.median = median(q);
    s.max = q.back();
    for (int p : {50, 90, 95, 99}) {
        auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(q.size())));
        s.percentiles[p] = q[std::max<std::size_t>(rank, 1) - 1];
    }
    s.median_ms = median(ms);
    s.max_ms = ms.back();
    return s;
}

}  // namespace

double qerror(double est, double real) {
    if (est < 0 || real < 0) throw Error("qerror needs non-negative inputs");
    if (est == 0 && real == 0) return 1.0;
    if (est == 0 || real == 0) return std::numeric_limits<double>::infinity();
    return std::max(est / real, real / est);
}

std::vector<BenchConfig> parse_bench_configs(std::string_view text) {
    std::vector<BenchConfig> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string name;
        if (!(words >> name)) continue;
        std::string pets, epests, ct = "condIndep(MoDi)", seed;
        std::string w;
        while (words >> w) {
            auto eq = w.find('=');
            if (eq == std::string::npos) throw ParseError("config line needs key=value fields", lineno);
            auto k = w.substr(0, eq), v = w.substr(eq + 1);
            if (k == "pets") pets = v;
            else if (k == "epests") epests = v;
            else if (k == "ct") ct = v;
            else if (k == "seed") seed = v;
            else throw ParseError("unknown config field '" + k + "'", lineno);
        }
        BenchConfig c{name, make_config(pets, epests, ct)};
        if (!seed.empty()) c.estimator.seed = std::stoull(seed);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<BenchConfig> load_bench_configs(const std::filesystem::path& path) { return parse_bench_configs(read_file(path)); }

std::vector<QueryDocument> parse_workload(std::string_view text) {
    std::vector<QueryDocument> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_query_document(line));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (out.back().id.empty()) out.back().id = "q" + std::to_string(lineno);
    }
    return out;
}

std::vector<QueryDocument> load_workload(const std::filesystem::path& path) { return parse_workload(read_file(path)); }

std::uint64_t exact_document_count(const PropertyGraph& g, const QueryDocument& doc, std::uint64_t budget) {
    if (doc.any_of.empty()) return exact_matches(g, doc.pattern, Semantics::Homomorphic, budget);
    std::size_t terms = 1;
    for (const auto& grp : doc.any_of) {
        if (grp.size() >= 20) throw ResourceError("anyOf group too large for the exact oracle");
        terms *= (std::size_t{1} << grp.size()) - 1;
        if (terms > kMaxInclusionTerms) throw ResourceError("anyOf expansion too large for the exact oracle");
    }
    // Inclusion-exclusion per group over non-empty alternative subsets.
    __int128 total = 0;
    std::vector<std::size_t> pick(doc.any_of.size(), 1);
    while (true) {
        QueryPattern q = doc.pattern;
        int sign = 1;
        for (std::size_t gi = 0; gi < doc.any_of.size(); ++gi) {
            const auto& grp = doc.any_of[gi];
            int bits = 0;
            for (std::size_t a = 0; a < grp.size(); ++a)
                if (pick[gi] >> a & 1) {
                    apply_alternative(q, grp[a]);
                    ++bits;
                }
            if (bits % 2 == 0) sign = -sign;
        }
        total += sign * static_cast<__int128>(exact_matches(g, q, Semantics::Homomorphic, budget));
        std::size_t gi = 0;
        for (; gi < pick.size(); ++gi) {
            if (++pick[gi] < (std::size_t{1} << doc.any_of[gi].size())) break;
            pick[gi] = 1;
        }
        if (gi == pick.size()) break;
    }
    return static_cast<std::uint64_t>(total);
}

std::vector<QueryDocument> connected_subqueries(const QueryDocument& doc, std::size_t max_edges) {
    const auto& q = doc.pattern;
    if (q.edges.empty() || max_edges == 0) return {doc};
    const std::size_t n = q.edges.size();
    std::set<std::vector<bool>> seen;
    std::vector<std::vector<bool>> frontier;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<bool> s(n, false);
        s[i] = true;
        if (seen.insert(s).second) frontier.push_back(s);
    }
    for (std::size_t size = 2; size <= max_edges; ++size) {
        std::vector<std::vector<bool>> next;
        for (const auto& s : frontier) {
            std::set<std::string> verts;
            for (std::size_t i = 0; i < n; ++i)
                if (s[i]) verts.insert({q.edges[i].src, q.edges[i].trg});
            for (std::size_t i = 0; i < n; ++i) {
                if (s[i] || !(verts.count(q.edges[i].src) || verts.count(q.edges[i].trg))) continue;
                auto t = s;
                t[i] = true;
                if (seen.insert(t).second) next.push_back(t);
            }
        }
        frontier = std::move(next);
    }
    std::vector<QueryDocument> out;
    for (const auto& s : seen) {
        QueryDocument sub;
        std::set<std::string> ids;
        std::string name;
        for (std::size_t i = 0; i < n; ++i) {
            if (!s[i]) continue;
            const auto& e = q.edges[i];
            sub.pattern.edges.push_back(e);
            ids.insert({e.id, e.src, e.trg});
            name += (name.empty() ? "" : "+") + e.id;
        }
        for (const auto& v : q.vertices)
            if (ids.count(v.id)) sub.pattern.vertices.push_back(v);
        bool has_props = false;
        for (const auto& p : q.props)
            if (ids.count(p.id)) {
                sub.pattern.props.push_back(p);
                has_props = true;
            }
        for (const auto& grp : doc.any_of) {
            bool inside = std::all_of(grp.begin(), grp.end(), [&](const Alternative& a) { return ids.count(a.id) > 0; });
            if (inside) {
                sub.any_of.push_back(grp);
                for (const auto& a : grp) has_props = has_props || !a.props.empty();
            }
        }
        sub.id = doc.id + "/" + name;
        if (has_props) {
            QueryDocument bare = sub;
            bare.id += "/noprops";
            bare.pattern.props.clear();
            for (auto& grp : bare.any_of)
                for (auto& a : grp) a.props.clear();
            out.push_back(std::move(sub));
            out.push_back(std::move(bare));
        } else {
            out.push_back(std::move(sub));
        }
    }
    std::sort(out.begin(), out.end(), [](const QueryDocument& a, const QueryDocument& b) {
        if (a.pattern.edges.size() != b.pattern.edges.size()) return a.pattern.edges.size() < b.pattern.edges.size();
        return a.id < b.id;
    });
    return out;
}

BenchResult run_workload(const PropertyGraph& g, const StatisticsCatalog& cat, const std::vector<QueryDocument>& queries,
                         const std::vector<BenchConfig>& configs, const BenchOptions& opt) {
    std::vector<QueryDocument> docs;
    for (const auto& d : queries) {
        if (opt.subquery_edges == 0) {
            docs.push_back(d);
            continue;
        }
        auto subs = connected_subqueries(d, opt.subquery_edges);
        docs.insert(docs.end(), subs.begin(), subs.end());
    }
    BenchResult res;
    for (const auto& doc : docs) {
        std::uint64_t exact = 0;
        auto t0 = std::chrono::steady_clock::now();
        try {
            exact = exact_document_count(g, doc, opt.oracle_budget);
        } catch (const OracleBudgetError&) {
            res.skipped.push_back(doc.id);
            continue;
        } catch (const ResourceError&) {
            res.skipped.push_back(doc.id);
            continue;
        }
        double oracle_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& cfg : configs) {
            auto rep = estimate_document(doc, &g, cat, cfg.estimator);
            BenchRow row;
            row.query_id = doc.id;
            row.n_edge_ids = doc.pattern.edges.size();
            row.config = cfg.name;
            row.exact = static_cast<double>(exact);
            row.estimate = rep.cardinality;
            row.qerror = qerror(rep.cardinality, row.exact);
            row.est_ms = opt.timing ? rep.wall_ms : 0.0;
            row.oracle_ms = opt.timing ? oracle_ms : 0.0;
            res.rows.push_back(std::move(row));
        }
    }
    return res;
}

std::string rows_to_csv(const std::vector<BenchRow>& rows) {
    std::string out = "query_id,n_edge_ids,config,exact,estimate,qerror,est_ms,oracle_ms\n";
    for (const auto& r : rows) {
        out += csv_field(r.query_id) + "," + std::to_string(r.n_edge_ids) + "," + csv_field(r.config) + "," + num(r.exact) +
               "," + num(r.estimate) + "," + num(r.qerror) + "," + num(r.est_ms) + "," + num(r.oracle_ms) + "\n";
    }
    return out;
}

QErrorSummary summarize(const std::vector<BenchRow>& rows) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_cfg;
    std::map<std::string, std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>>> by_edges;
    for (const auto& r : rows) {
        by_cfg[r.config].first.push_back(r.qerror);
        by_cfg[r.config].second.push_back(r.est_ms);
        by_edges[r.config][r.n_edge_ids].first.push_back(r.qerror);
        by_edges[r.config][r.n_edge_ids].second.push_back(r.est_ms);
    }
    QErrorSummary s;
    for (auto& [cfg, v] : by_cfg) s.per_config[cfg] = stats_of(v.first, v.second);
    for (auto& [cfg, m] : by_edges)
        for (auto& [k, v] : m) s.per_edges[cfg][k] = stats_of(v.first, v.second);
    return s;
}

std::string summary_to_text(const QErrorSummary& s) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %6s %12s %12s %12s %12s %10s\n", "config", "n", "median", "p90", "p99", "max", "med_ms");
    os << buf;
    for (const auto& [cfg, st] : s.per_config) {
        std::snprintf(buf, sizeof buf, "%-24s %6zu %12.4g %12.4g %12.4g %12.4g %10.3g\n", cfg.c_str(), st.n, st.median,
                      st.percentiles.at(90), st.percentiles.at(99), st.max, st.median_ms);
        os << buf;
        for (const auto& [k, e] : s.per_edges.at(cfg)) {
            std::snprintf(buf, sizeof buf, "  %-22s %6zu %12.4g %12.4g %12.4g %12.4g %10.3g\n",
                          (std::to_string(k) + " edges").c_str(), e.n, e.median, e.percentiles.at(90), e.percentiles.at(99),
                          e.max, e.median_ms);
            os << buf;
        }
    }
    return os.str();
}

}  // namespace cardest
