#include "cardest/pets.hpp"

#include <algorithm>
#include <cmath>

#include "cardest/errors.hpp"

namespace cardest {

namespace {

double clamp01(double s) { return std::isnan(s) ? 0.0 : std::clamp(s, 0.0, 1.0); }

bool sample_satisfies(const SampledElement& e, const Constraint& c) {
    switch (c.kind()) {
        case ConstraintKind::Vertex: return e.is_vertex;
        case ConstraintKind::Edge: return !e.is_vertex;
        case ConstraintKind::HasLabel: return std::find(e.labels.begin(), e.labels.end(), c.name()) != e.labels.end();
        case ConstraintKind::HasKey: return e.props.count(c.name()) > 0;
        case ConstraintKind::PropValue: {
            auto it = e.props.find(c.name());
            return it != e.props.end() && eval_predicate(it->second, c.op(), c.operand());
        }
        default: return false;
    }
}

std::optional<double> sampled_prop(const Constraint& c, const StatisticsCatalog& cat) {
    for (auto pt : {SamplePattern::Id, SamplePattern::Vertex}) {
        for (const auto& s : cat.samples) {
            if (s.pattern != pt || s.members.empty() || cat.basic.n_ids == 0) continue;
            std::size_t hit = 0;
            for (const auto& m : s.members) hit += sample_satisfies(m.parts[0], c);
            double frac = static_cast<double>(hit) / static_cast<double>(s.members.size());
            return frac * static_cast<double>(s.population) / static_cast<double>(cat.basic.n_ids);
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::string> split_tags(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if ((c == ',' || c == ';') && depth == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
            continue;
        }
        if (c != ' ') cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

PetSpec parse_pet_tag(std::string_view tag) {
    PetSpec p;
    p.tag = std::string(tag);
    auto args = [&]() -> std::vector<std::string> {
        auto open = tag.find('('), close = tag.rfind(')');
        if (open == std::string_view::npos || close == std::string_view::npos || close < open)
            throw ConfigError("malformed technique tag '" + std::string(tag) + "'");
        return split_tags(tag.substr(open + 1, close - open - 1));
    };
    if (tag == "EP") return p;
    if (tag == "SysR") return p.kind = PetKind::SysR, p;
    if (tag == "CS") return p.kind = PetKind::CharSets, p;
    if (tag == "BS") return p.kind = PetKind::BoundSketch, p;
    if (tag == "MDH") return p.kind = PetKind::MDHistogram, p;
    if (tag == "defaults") return p.kind = PetKind::Defaults, p;
    if (tag.rfind("S(", 0) == 0) {
        auto a = args();
        if (a.empty() || a.size() > 2) throw ConfigError("S(pt,pr) takes one or two arguments");
        p.kind = PetKind::Sampling;
        p.sample_pattern = parse_sample_pattern(a[0]);
        if (a.size() == 2) p.sample_probability = std::stod(a[1]);
        return p;
    }
    if (tag.rfind("WJ", 0) == 0) {
        p.kind = PetKind::WanderJoin;
        if (tag.size() > 2) {
            auto a = args();
            if (a.size() != 1) throw ConfigError("WJ(n) takes one argument");
            p.walks = std::stoull(a[0]);
        }
        return p;
    }
    if (tag.size() >= 2 && (tag[0] == 'c' || tag[0] == 's' || tag[0] == 't') &&
        std::all_of(tag.begin() + 1, tag.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        p.kind = tag[0] == 'c' ? PetKind::Chain : tag[0] == 's' ? PetKind::SourceStar : PetKind::TargetStar;
        p.size = std::stoi(std::string(tag.substr(1)));
        if (p.size < 1) throw ConfigError("synopsis size must be >= 1 in '" + std::string(tag) + "'");
        return p;
    }
    throw ConfigError("unknown technique tag '" + std::string(tag) + "'");
}

std::vector<PetSpec> parse_pet_list(std::string_view text) {
    std::vector<PetSpec> out;
    for (const auto& t : split_tags(text))
        if (t != "{}") out.push_back(parse_pet_tag(t));
    return out;
}

double default_selectivity(Predicate op) {
    switch (op) {
        case Predicate::EQ: return 1.0 / 10.0;
        case Predicate::NEQ: return 9.0 / 10.0;
        default: return 1.0 / 3.0;
    }
}

double to_selectivity(double cardinality, std::size_t k, std::uint64_t n_ids) {
    if (n_ids == 0) return 0.0;
    return clamp01(cardinality / std::pow(static_cast<double>(n_ids), static_cast<double>(k)));
}

PartialEstimate individual_estimate(const Constraint& c, const StatisticsCatalog& cat, bool defaults_only) {
    PartialEstimate pe;
    pe.constraints = {c};
    pe.technique = Technique::Exact;
    pe.tag = "individual";
    const auto& b = cat.basic;
    const double n = static_cast<double>(b.n_ids);
    auto frac = [&](double count, int power = 1) { return b.n_ids ? clamp01(count / std::pow(n, power)) : 0.0; };
    switch (c.kind()) {
        case ConstraintKind::Vertex: pe.selectivity = frac(static_cast<double>(b.n_vertices)); break;
        case ConstraintKind::Edge: pe.selectivity = frac(static_cast<double>(b.n_edges)); break;
        case ConstraintKind::Src:
        case ConstraintKind::Trg: pe.selectivity = frac(static_cast<double>(b.n_edges), 2); break;
        case ConstraintKind::HasLabel: {
            auto it = b.label_sel.find(c.name());
            pe.selectivity = frac(it == b.label_sel.end() ? 0.0 : static_cast<double>(it->second.total()));
            break;
        }
        case ConstraintKind::HasKey: {
            auto it = b.key_sel.find(c.name());
            pe.selectivity = frac(it == b.key_sel.end() ? 0.0 : static_cast<double>(it->second));
            break;
        }
        case ConstraintKind::PropValue: {
            if (!defaults_only) {
                auto it = b.prop_exact.find(prop_triple_key(c.name(), c.op(), c.operand()));
                if (it != b.prop_exact.end()) {
                    pe.selectivity = frac(static_cast<double>(it->second));
                    return pe;
                }
                if (const auto* h = cat.histogram(c.name()); h && b.n_ids) {
                    if (auto est = h->estimate(c.op(), c.operand())) {
                        pe.selectivity = frac(*est);
                        pe.technique = Technique::Histogram;
                        return pe;
                    }
                }
                if (auto s = sampled_prop(c, cat)) {
                    pe.selectivity = clamp01(*s);
                    pe.technique = Technique::Sampling;
                    return pe;
                }
            }
            pe.selectivity = default_selectivity(c.op());
            pe.technique = Technique::Default;
            pe.tag = "default";
            break;
        }
    }
    return pe;
}

PES pet_individual(const QueryPattern& q, const StatisticsCatalog& cat, bool defaults_only) {
    PES out;
    for (const auto& c : extract_constraints(q)) out.push_back(individual_estimate(c, cat, defaults_only));
    return out;
}

std::vector<std::map<std::string, std::string>> label_choices(const QueryPattern& q, const std::vector<std::string>& ids,
                                                              std::size_t cap) {
    std::vector<std::map<std::string, std::string>> out{{}};
    for (const auto& id : ids) {
        if (out.front().count(id)) continue;
        auto labels = q.labels_of(id);
        if (labels.empty()) labels.push_back(kWildcard);
        std::vector<std::map<std::string, std::string>> next;
        for (const auto& partial : out)
            for (const auto& l : labels) {
                if (next.size() >= cap) break;
                auto m = partial;
                m[id] = l;
                next.push_back(std::move(m));
            }
        out = std::move(next);
    }
    return out;
}

PES pet_sampling(const QueryPattern& q, const StatisticsCatalog& cat, SamplePattern pt, std::optional<double> probability) {
    PES out;
    const Sample* sample = nullptr;
    for (const auto& s : cat.samples)
        if (s.pattern == pt && (!probability || std::abs(s.probability - *probability) < 1e-12)) {
            sample = &s;
            break;
        }
    if (!sample || sample->members.empty() || cat.basic.n_ids == 0) return out;
    const double members = static_cast<double>(sample->members.size());
    const double population = static_cast<double>(sample->population);
    const std::string tag = "S(" + std::string(sample_pattern_name(pt)) + "," + scalar_to_string(sample->probability) + ")";

    if (pt == SamplePattern::EdgePattern) {
        for (const auto& sp : enumerate_subpatterns(q, {PatternClass::PerEdgePattern, 1})) {
            const auto* e = q.edge(sp.center);
            const bool loop = e->src == e->trg;
            std::size_t hit = 0;
            for (const auto& m : sample->members) {
                if (loop && !m.self_loop) continue;
                bool ok = true;
                for (const auto& c : sp.constraints) {
                    if (!c.is_data()) continue;
                    const auto& part = c.id() == e->src ? m.parts[0] : c.id() == e->id ? m.parts[1] : m.parts[2];
                    ok = ok && sample_satisfies(part, c);
                }
                hit += ok;
            }
            double card = static_cast<double>(hit) / members * population;
            out.push_back({sp.constraints, to_selectivity(card, ids_of(sp.constraints).size(), cat.basic.n_ids),
                           Technique::Sampling, tag});
        }
        return out;
    }
    for (const auto& sp : enumerate_subpatterns(q, {PatternClass::PerId, 1})) {
        const bool is_vertex = q.has_vertex(sp.center);
        if (pt == SamplePattern::Vertex && !is_vertex) continue;
        ConstraintSet cs = sp.constraints;
        cs.insert(is_vertex ? Constraint::vertex(sp.center) : Constraint::edge(sp.center));
        std::size_t hit = 0;
        for (const auto& m : sample->members) {
            bool ok = true;
            for (const auto& c : cs) ok = ok && sample_satisfies(m.parts[0], c);
            hit += ok;
        }
        double card = static_cast<double>(hit) / members * population;
        out.push_back({std::move(cs), to_selectivity(card, 1, cat.basic.n_ids), Technique::Sampling, tag});
    }
    return out;
}

PES pet_md_histogram(const QueryPattern& q, const StatisticsCatalog& cat) {
    PES out;
    if (cat.basic.n_ids == 0) return out;
    for (const auto& id : q.ids()) {
        ConstraintSet cs;
        std::set<std::string> keys;
        for (const auto& p : q.props)
            if (p.id == id) {
                cs.insert(Constraint::prop_value(p.id, p.key, p.op, p.value));
                keys.insert(p.key);
            }
        if (cs.empty()) continue;
        const MDHistogram* best = nullptr;
        for (const auto& h : cat.md_histograms) {
            bool covers = std::all_of(keys.begin(), keys.end(), [&](const std::string& k) {
                return std::find(h.keys.begin(), h.keys.end(), k) != h.keys.end();
            });
            if (covers && (!best || h.keys.size() < best->keys.size())) best = &h;
        }
        if (!best) continue;
        std::vector<std::vector<std::pair<Predicate, Operand>>> preds(best->keys.size());
        for (const auto& c : cs) {
            auto a = std::find(best->keys.begin(), best->keys.end(), c.name()) - best->keys.begin();
            preds[static_cast<std::size_t>(a)].emplace_back(c.op(), c.operand());
        }
        out.push_back({std::move(cs), to_selectivity(best->estimate(preds), 1, cat.basic.n_ids), Technique::MDHistogram, "MDH"});
    }
    return out;
}

}  // namespace cardest
