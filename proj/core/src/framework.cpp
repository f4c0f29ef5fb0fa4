#include "cardest/framework.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json_util.hpp"

#include "cardest/errors.hpp"

namespace cardest {

using detail::json;

namespace {

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + what + ": '" + text + "'");
    }
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

CtSpec parse_ct_tag(std::string_view tag) {
    CtSpec ct;
    ct.tag = std::string(tag);
    if (tag == "bounds") {
        ct.kind = CtKind::Bounds;
        return ct;
    }
    auto args = [&](std::string_view head) -> std::vector<std::string> {
        if (tag.size() == head.size()) return {};
        if (tag[head.size()] != '(' || tag.back() != ')') throw ConfigError("malformed CT tag '" + std::string(tag) + "'");
        return split_tags(tag.substr(head.size() + 1, tag.size() - head.size() - 2));
    };
    if (tag.rfind("condIndep", 0) == 0) {
        auto a = args("condIndep");
        if (a.size() > 1) throw ConfigError("condIndep takes one sort strategy");
        if (!a.empty()) ct.strategy = parse_sort_strategy(a[0]);
        ct.tag = "condIndep(" + std::string(sort_strategy_name(ct.strategy)) + ")";
        return ct;
    }
    if (tag.rfind("maxEnt", 0) == 0) {
        ct.kind = CtKind::MaxEnt;
        for (const auto& kv : args("maxEnt")) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("maxEnt parameters are key=value, got '" + kv + "'");
            auto k = kv.substr(0, eq), v = kv.substr(eq + 1);
            if (k == "mps") ct.max_ent.mps = static_cast<int>(parse_number(v, k));
            else if (k == "tol") ct.max_ent.tol = parse_number(v, k);
            else if (k == "iter" || k == "max_iter") ct.max_ent.max_iter = static_cast<int>(parse_number(v, k));
            else throw ConfigError("unknown maxEnt parameter '" + k + "'");
        }
        if (ct.max_ent.mps < 1 || ct.max_ent.mps > kMaxEntHardCap)
            throw ConfigError("maxEnt mps must be within [1, " + std::to_string(kMaxEntHardCap) + "]");
        return ct;
    }
    throw ConfigError("unknown CT tag '" + std::string(tag) + "'");
}

EstimatorConfig make_config(std::string_view pets, std::string_view epests, std::string_view ct) {
    EstimatorConfig cfg;
    cfg.pets = parse_pet_list(pets);
    cfg.epests = parse_epest_list(epests);
    cfg.ct = parse_ct_tag(ct.empty() ? "condIndep(MoDi)" : ct);
    return cfg;
}

PES run_pets(const QueryPattern& q, const PropertyGraph* g, const StatisticsCatalog& cat, const EstimatorConfig& cfg) {
    bool defaults_only = std::any_of(cfg.pets.begin(), cfg.pets.end(), [](const PetSpec& p) { return p.kind == PetKind::Defaults; });
    PES out = pet_individual(q, cat, defaults_only);
    for (const auto& p : cfg.pets) {
        PES add;
        switch (p.kind) {
            case PetKind::EdgePattern: add = pet_labeled_synopsis(q, cat, SynopsisClass::Edge, 1); break;
            case PetKind::Chain: add = pet_labeled_synopsis(q, cat, SynopsisClass::Chain, p.size); break;
            case PetKind::SourceStar: add = pet_labeled_synopsis(q, cat, SynopsisClass::SourceStar, p.size); break;
            case PetKind::TargetStar: add = pet_labeled_synopsis(q, cat, SynopsisClass::TargetStar, p.size); break;
            case PetKind::SysR: add = pet_sysr(q, cat); break;
            case PetKind::CharSets: add = pet_char_sets(q, cat); break;
            case PetKind::BoundSketch: add = pet_bound_sketch(q, cat); break;
            case PetKind::Sampling: add = pet_sampling(q, cat, p.sample_pattern, p.sample_probability); break;
            case PetKind::WanderJoin:
                if (g)
                    if (auto pe = pet_wander_join(q, *g, p.walks, cfg.seed)) add.push_back(*pe);
                break;
            case PetKind::MDHistogram: add = pet_md_histogram(q, cat); break;
            case PetKind::Defaults: break;
        }
        out.insert(out.end(), add.begin(), add.end());
    }
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < out.size(); ++i) order.emplace_back(out[i].tag + "\x1f" + set_key(out[i].constraints), i);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    PES sorted;
    for (const auto& [k, i] : order) sorted.push_back(out[i]);
    return sorted;
}

PES dedupe(const PES& pes) {
    std::map<std::string, std::size_t> best;
    for (std::size_t i = 0; i < pes.size(); ++i) {
        auto key = set_key(pes[i].constraints);
        auto [it, fresh] = best.emplace(key, i);
        if (!fresh && trust_rank(pes[i].technique) < trust_rank(pes[it->second].technique)) it->second = i;
    }
    std::vector<std::size_t> keep;
    for (const auto& [k, i] : best) keep.push_back(i);
    std::sort(keep.begin(), keep.end());
    PES out;
    for (auto i : keep) out.push_back(pes[i]);
    return out;
}

EstimateReport combine(const PES& cpes, const QueryPattern& q, std::uint64_t n_ids, const CtSpec& ct) {
    EstimateReport r;
    CombineTrace trace;
    switch (ct.kind) {
        case CtKind::CondIndep: r.selectivity = combine_cond_indep(cpes, q, ct.strategy, &trace); break;
        case CtKind::MaxEnt: {
            auto me = combine_max_ent(cpes, q, ct.max_ent, &trace);
            if (me.converged) {
                r.selectivity = me.selectivity;
                break;
            }
            r.fallback = true;
            r.notes.push_back("maxEnt did not converge (residual " + fmt_double(me.residual) + "), fell back to condIndep(MoDi)");
            trace = {};
            r.selectivity = combine_cond_indep(cpes, q, SortStrategy::MoDi, &trace);
            break;
        }
        case CtKind::Bounds: {
            auto b = combine_bounds(cpes, q);
            r.lower = b.lower;
            r.upper = b.upper;
            r.selectivity = b.upper;
            trace.factors.push_back({"upper", b.upper, b.greedy ? "greedy" : "exact"});
            if (b.greedy) r.notes.push_back("upper bound searched greedily");
            break;
        }
    }
    r.factors = std::move(trace.factors);
    r.notes.insert(r.notes.end(), trace.notes.begin(), trace.notes.end());
    r.cardinality = selectivity_to_cardinality(r.selectivity, q.size(), n_ids);
    for (const auto& pe : cpes)
        r.pes.push_back({set_key(pe.constraints), pe.selectivity,
                         std::string(technique_name(pe.technique)) + ":" + pe.tag, pe.low_confidence});
    return r;
}

EstimateReport estimate(const QueryPattern& q, const PropertyGraph* g, const StatisticsCatalog& cat,
                        const EstimatorConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    PES pes = dedupe(run_pets(q, g, cat, cfg));
    pes = dedupe(apply_epests(pes, q, cfg.epests));
    auto cpes = make_complete(pes, q, cat);
    auto r = combine(cpes, q, cat.basic.n_ids, cfg.ct);
    for (const auto& pe : cpes)
        if (pe.low_confidence) r.notes.push_back("low confidence PE from " + pe.tag);
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<QueryPattern> expand_disjunctions(const QueryDocument& doc, std::size_t cap) {
    std::size_t total = 1;
    for (const auto& g : doc.any_of) {
        total *= g.size();
        if (total > cap)
            throw ConfigError("disjunction expansion exceeds the cap of " + std::to_string(cap) + " queries");
    }
    std::vector<QueryPattern> out{doc.pattern};
    for (const auto& group : doc.any_of) {
        std::vector<QueryPattern> next;
        for (const auto& base : out)
            for (const auto& alt : group) {
                QueryPattern q = base;
                auto add_labels = [&](std::vector<std::string>& labels) {
                    for (const auto& l : alt.labels)
                        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
                };
                for (auto& v : q.vertices)
                    if (v.id == alt.id) add_labels(v.labels);
                for (auto& e : q.edges)
                    if (e.id == alt.id) add_labels(e.labels);
                q.props.insert(q.props.end(), alt.props.begin(), alt.props.end());
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

EstimateReport estimate_document(const QueryDocument& doc, const PropertyGraph* g, const StatisticsCatalog& cat,
                                 const EstimatorConfig& cfg) {
    auto queries = expand_disjunctions(doc, cfg.max_expansions);
    if (queries.size() == 1) return estimate(queries.front(), g, cat, cfg);
    auto start = std::chrono::steady_clock::now();
    EstimateReport r;
    r.expansions = queries.size();
    r.cardinality = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto sub = estimate(queries[i], g, cat, cfg);
        r.cardinality += sub.cardinality;
        r.notes.push_back("alternative " + std::to_string(i) + ": cardinality " + fmt_double(sub.cardinality));
        for (auto& pe : sub.pes) r.pes.push_back(std::move(pe));
        r.fallback = r.fallback || sub.fallback;
    }
    const double space = selectivity_to_cardinality(1.0, doc.pattern.size(), cat.basic.n_ids);
    r.selectivity = space > 0 ? r.cardinality / space : 0.0;
    if (r.selectivity > 1.0) {
        r.selectivity = 1.0;
        r.cardinality = space;
        r.clamped = true;
        r.notes.push_back("summed alternatives exceed selectivity 1, clamped");
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string report_to_text(const EstimateReport& r) {
    std::ostringstream os;
    os << "selectivity  " << fmt_double(r.selectivity) << "\n";
    os << "cardinality  " << fmt_double(r.cardinality) << "\n";
    if (r.lower) os << "lower        " << fmt_double(*r.lower) << "\n";
    if (r.upper) os << "upper        " << fmt_double(*r.upper) << "\n";
    if (r.expansions > 1) os << "expansions   " << r.expansions << "\n";
    os << "time_ms      " << fmt_double(r.wall_ms) << "\n";
    os << "\npartial estimates (" << r.pes.size() << ")\n";
    for (const auto& pe : r.pes)
        os << "  " << fmt_double(pe.selectivity) << "  " << pe.provenance << (pe.low_confidence ? " (low confidence)" : "")
           << "  " << pe.constraints << "\n";
    if (!r.factors.empty()) {
        os << "\nfactors\n";
        for (const auto& f : r.factors) os << "  " << fmt_double(f.factor) << "  " << f.note << "  " << f.pe << "\n";
    }
    for (const auto& n : r.notes) os << "note: " << n << "\n";
    return os.str();
}

std::string report_to_json(const EstimateReport& r) {
    json j;
    j["selectivity"] = r.selectivity;
    j["cardinality"] = r.cardinality;
    if (r.lower) j["lower"] = *r.lower;
    if (r.upper) j["upper"] = *r.upper;
    j["expansions"] = r.expansions;
    j["fallback"] = r.fallback;
    j["clamped"] = r.clamped;
    j["wall_ms"] = r.wall_ms;
    json pes = json::array();
    for (const auto& pe : r.pes)
        pes.push_back({{"constraints", pe.constraints}, {"s", pe.selectivity}, {"provenance", pe.provenance},
                       {"low_confidence", pe.low_confidence}});
    j["pes"] = pes;
    json fs = json::array();
    for (const auto& f : r.factors) fs.push_back({{"pe", f.pe}, {"factor", f.factor}, {"note", f.note}});
    j["factors"] = fs;
    j["notes"] = r.notes;
    return j.dump(2);
}

}  // namespace cardest
