#include <fstream>
#include <sstream>

#include "cardest/errors.hpp"
#include "cardest/stats.hpp"
#include "json_util.hpp"

namespace cardest {

using detail::json;

namespace {

SynopsisClass synopsis_class_from(std::string_view s) {
    if (s == "edge") return SynopsisClass::Edge;
    if (s == "chain") return SynopsisClass::Chain;
    if (s == "sstar") return SynopsisClass::SourceStar;
    if (s == "tstar") return SynopsisClass::TargetStar;
    throw ParseError("unknown synopsis class '" + std::string(s) + "'");
}

std::string_view kind_name(HistogramKind k) { return k == HistogramKind::EquiWidth ? "equi_width" : "equi_depth"; }

json element_json(const SampledElement& e) {
    json props = json::object();
    for (const auto& [k, v] : e.props) props[k] = detail::scalar_to_json(v);
    return {{"v", e.is_vertex}, {"labels", e.labels}, {"props", props}};
}

SampledElement element_from(const json& j) {
    SampledElement e;
    e.is_vertex = j.at("v").get<bool>();
    e.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("props").items()) e.props.emplace(k, detail::scalar_from_json(v));
    return e;
}

json cs_json(const CharacteristicSetStore& s) {
    json entries = json::array();
    for (const auto& e : s.entries)
        entries.push_back({{"labels", e.labels}, {"keys", e.keys}, {"count", e.count}, {"label_counts", e.label_counts}});
    return {{"direction", s.direction == Direction::Out ? "out" : "in"}, {"max_entries", s.max_entries}, {"entries", entries}};
}

CharacteristicSetStore cs_from(const json& j) {
    CharacteristicSetStore s;
    s.direction = j.at("direction").get<std::string>() == "out" ? Direction::Out : Direction::In;
    s.max_entries = j.at("max_entries").get<std::size_t>();
    for (const auto& e : j.at("entries")) {
        CharacteristicSet c;
        c.labels = e.at("labels").get<std::set<std::string>>();
        c.keys = e.at("keys").get<std::set<std::string>>();
        c.count = e.at("count").get<std::uint64_t>();
        c.label_counts = e.at("label_counts").get<std::map<std::string, std::uint64_t>>();
        s.entries.push_back(std::move(c));
    }
    return s;
}

}  // namespace

std::vector<std::pair<SynopsisClass, int>> parse_synopsis_list(std::string_view text) {
    std::vector<std::pair<SynopsisClass, int>> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "edge" || item == "EP") {
            out.emplace_back(SynopsisClass::Edge, 1);
            continue;
        }
        auto pos = item.find_first_of("0123456789");
        if (pos == std::string::npos || pos == 0) throw ConfigError("bad synopsis spec '" + item + "'");
        auto name = item.substr(0, pos);
        int n = std::stoi(item.substr(pos));
        if (name == "c") name = "chain";
        if (name == "s") name = "sstar";
        if (name == "t") name = "tstar";
        try {
            out.emplace_back(synopsis_class_from(name), n);
        } catch (const ParseError&) {
            throw ConfigError("bad synopsis spec '" + item + "'");
        }
    }
    return out;
}

const LabeledTopoSynopsis* StatisticsCatalog::synopsis(SynopsisClass cls, int size) const {
    const LabeledTopoSynopsis* best = nullptr;
    for (const auto& s : synopses)
        if (s.cls == cls && s.max_size >= size && (!best || s.max_size < best->max_size)) best = &s;
    return best;
}

const Histogram* StatisticsCatalog::histogram(const std::string& key) const {
    for (const auto& h : histograms)
        if (h.key == key) return &h;
    return nullptr;
}

StatisticsCatalog build_catalog(const PropertyGraph& g, const StatsConfig& cfg) {
    StatisticsCatalog c;
    c.fingerprint = g.fingerprint_hex();
    c.basic = build_basic(g, cfg.exact_props);
    for (const auto& [cls, n] : cfg.synopses) c.synopses.push_back(build_labeled_synopsis(g, cls, n));
    if (cfg.sysr) c.sysr = build_sysr(g);
    if (cfg.cs_max_entries) {
        c.cs = build_char_sets(g, cfg.cs_max_entries, Direction::Out);
        if (cfg.cs_in) c.cs_in = build_char_sets(g, cfg.cs_max_entries, Direction::In);
    }
    if (cfg.sketch_buckets) c.sketches.push_back(build_bound_sketch(g, cfg.sketch_buckets, cfg.seed));
    std::uint64_t seed = cfg.seed;
    for (const auto& s : cfg.samples) c.samples.push_back(build_sample(g, s.pattern, s.probability, seed++));
    for (const auto& h : cfg.histograms) c.histograms.push_back(build_histogram(g, h.key, h.kind, h.buckets));
    for (const auto& h : cfg.md_histograms) c.md_histograms.push_back(build_md_histogram(g, h.keys, h.buckets));
    return c;
}

std::string catalog_to_string(const StatisticsCatalog& c) {
    json j;
    j["version"] = StatisticsCatalog::kVersion;
    j["fingerprint"] = c.fingerprint;
    json labels = json::object();
    for (const auto& [l, n] : c.basic.label_sel) labels[l] = {n.vertices, n.edges};
    j["basic"] = {{"n_vertices", c.basic.n_vertices}, {"n_edges", c.basic.n_edges}, {"n_ids", c.basic.n_ids},
                  {"labels", labels}, {"keys", c.basic.key_sel}, {"prop_exact", c.basic.prop_exact}};
    json syn = json::array();
    for (const auto& s : c.synopses)
        syn.push_back({{"class", synopsis_class_name(s.cls)}, {"max_size", s.max_size}, {"counts", s.counts}});
    j["synopses"] = syn;
    if (c.sysr) {
        json e = json::object();
        for (const auto& [k, v] : c.sysr->entries) e[k] = {v.n, v.distinct_src, v.distinct_trg};
        j["sysr"] = e;
    }
    if (c.cs) j["cs"] = cs_json(*c.cs);
    if (c.cs_in) j["cs_in"] = cs_json(*c.cs_in);
    json sk = json::array();
    for (const auto& s : c.sketches) {
        json entries = json::object();
        for (const auto& [k, roles] : s.entries) {
            json r = json::array();
            for (const auto& role : roles) {
                json buckets = json::array();
                for (const auto& [b, v] : role) buckets.push_back({b, v.count, v.max_degree});
                r.push_back(buckets);
            }
            entries[k] = r;
        }
        sk.push_back({{"n_buckets", s.n_buckets}, {"seed", s.seed}, {"entries", entries}});
    }
    j["sketches"] = sk;
    json samples = json::array();
    for (const auto& s : c.samples) {
        json members = json::array();
        for (const auto& m : s.members) {
            json parts = json::array();
            for (const auto& p : m.parts) parts.push_back(element_json(p));
            members.push_back({{"parts", parts}, {"loop", m.self_loop}});
        }
        samples.push_back({{"pattern", sample_pattern_name(s.pattern)}, {"probability", s.probability}, {"seed", s.seed},
                           {"population", s.population}, {"members", members}});
    }
    j["samples"] = samples;
    json hs = json::array();
    for (const auto& h : c.histograms) {
        json buckets = json::array();
        for (const auto& b : h.buckets) buckets.push_back({{"lo", b.lo}, {"hi", b.hi}, {"prefix", b.prefix}, {"count", b.count}, {"distinct", b.distinct}});
        hs.push_back({{"key", h.key}, {"kind", kind_name(h.kind)},
                      {"domain", h.domain == HistogramDomain::Numeric ? "numeric" : "string_prefix"},
                      {"prefix_length", h.prefix_length}, {"total", h.total}, {"buckets", buckets}});
    }
    j["histograms"] = hs;
    json mds = json::array();
    for (const auto& h : c.md_histograms) {
        json grid = json::array();
        for (const auto& [coords, cell] : h.grid) grid.push_back({{"at", coords}, {"count", cell.count}, {"distinct", cell.distinct}});
        mds.push_back({{"keys", h.keys}, {"bounds", h.bounds}, {"total", h.total}, {"grid", grid}});
    }
    j["md_histograms"] = mds;
    return j.dump(1) + "\n";
}

StatisticsCatalog catalog_from_string(const std::string& text) {
    StatisticsCatalog c;
    try {
        json j = json::parse(text);
        if (!j.is_object() || j.value("version", 0) != StatisticsCatalog::kVersion)
            throw ParseError("unsupported catalog version");
        c.fingerprint = j.at("fingerprint").get<std::string>();
        const auto& b = j.at("basic");
        c.basic.n_vertices = b.at("n_vertices").get<std::uint64_t>();
        c.basic.n_edges = b.at("n_edges").get<std::uint64_t>();
        c.basic.n_ids = b.at("n_ids").get<std::uint64_t>();
        for (const auto& [l, v] : b.at("labels").items()) c.basic.label_sel[l] = {v.at(0).get<std::uint64_t>(), v.at(1).get<std::uint64_t>()};
        c.basic.key_sel = b.at("keys").get<std::map<std::string, std::uint64_t>>();
        c.basic.prop_exact = b.at("prop_exact").get<std::map<std::string, std::uint64_t>>();
        if (c.basic.n_ids != c.basic.n_vertices + c.basic.n_edges) throw ParseError("catalog counts are inconsistent");
        for (const auto& s : j.at("synopses")) {
            LabeledTopoSynopsis syn;
            syn.cls = synopsis_class_from(s.at("class").get<std::string>());
            syn.max_size = s.at("max_size").get<int>();
            syn.counts = s.at("counts").get<std::map<std::string, std::uint64_t>>();
            c.synopses.push_back(std::move(syn));
        }
        if (j.contains("sysr")) {
            SysRStats s;
            for (const auto& [k, v] : j.at("sysr").items())
                s.entries[k] = {v.at(0).get<std::uint64_t>(), v.at(1).get<std::uint64_t>(), v.at(2).get<std::uint64_t>()};
            c.sysr = std::move(s);
        }
        if (j.contains("cs")) c.cs = cs_from(j.at("cs"));
        if (j.contains("cs_in")) c.cs_in = cs_from(j.at("cs_in"));
        for (const auto& s : j.at("sketches")) {
            BoundSketch sk;
            sk.n_buckets = s.at("n_buckets").get<std::uint32_t>();
            sk.seed = s.at("seed").get<std::uint64_t>();
            for (const auto& [k, roles] : s.at("entries").items()) {
                auto& e = sk.entries[k];
                for (std::size_t r = 0; r < 2; ++r)
                    for (const auto& t : roles.at(r)) e[r][t.at(0).get<std::uint32_t>()] = {t.at(1).get<std::uint64_t>(), t.at(2).get<std::uint64_t>()};
            }
            c.sketches.push_back(std::move(sk));
        }
        for (const auto& s : j.at("samples")) {
            Sample smp;
            smp.pattern = parse_sample_pattern(s.at("pattern").get<std::string>());
            smp.probability = s.at("probability").get<double>();
            smp.seed = s.at("seed").get<std::uint64_t>();
            smp.population = s.at("population").get<std::uint64_t>();
            for (const auto& m : s.at("members")) {
                SampleMember mem;
                for (const auto& p : m.at("parts")) mem.parts.push_back(element_from(p));
                mem.self_loop = m.at("loop").get<bool>();
                smp.members.push_back(std::move(mem));
            }
            c.samples.push_back(std::move(smp));
        }
        for (const auto& h : j.at("histograms")) {
            Histogram hist;
            hist.key = h.at("key").get<std::string>();
            hist.kind = h.at("kind").get<std::string>() == "equi_width" ? HistogramKind::EquiWidth : HistogramKind::EquiDepth;
            hist.domain = h.at("domain").get<std::string>() == "numeric" ? HistogramDomain::Numeric : HistogramDomain::StringPrefix;
            hist.prefix_length = h.at("prefix_length").get<std::size_t>();
            hist.total = h.at("total").get<std::uint64_t>();
            for (const auto& b : h.at("buckets"))
                hist.buckets.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("prefix").get<std::string>(),
                                        b.at("count").get<std::uint64_t>(), b.at("distinct").get<std::uint64_t>()});
            c.histograms.push_back(std::move(hist));
        }
        for (const auto& h : j.at("md_histograms")) {
            MDHistogram md;
            md.keys = h.at("keys").get<std::vector<std::string>>();
            md.bounds = h.at("bounds").get<std::vector<std::vector<double>>>();
            md.total = h.at("total").get<std::uint64_t>();
            for (const auto& cell : h.at("grid"))
                md.grid[cell.at("at").get<std::vector<std::uint32_t>>()] = {cell.at("count").get<std::uint64_t>(),
                                                                           cell.at("distinct").get<std::vector<std::uint64_t>>()};
            c.md_histograms.push_back(std::move(md));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("corrupted catalog: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string("corrupted catalog: ") + e.what());
    }
    return c;
}

void save_catalog(const StatisticsCatalog& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write catalog " + path.string());
    out << catalog_to_string(c);
}

StatisticsCatalog load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open catalog " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return catalog_from_string(ss.str());
}

std::optional<std::string> stale_catalog_warning(const StatisticsCatalog& c, const PropertyGraph& g) {
    auto fp = g.fingerprint_hex();
    if (c.fingerprint == fp) return std::nullopt;
    return "catalog fingerprint " + c.fingerprint + " does not match graph " + fp + "; statistics may be stale";
}

}  // namespace cardest
