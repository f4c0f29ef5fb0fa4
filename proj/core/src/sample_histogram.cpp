#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cardest/errors.hpp"
#include "cardest/stats.hpp"

namespace cardest {

namespace {

SampledElement materialize(const PropertyGraph& g, ElementId id) {
    SampledElement s;
    s.is_vertex = g.is_vertex(id);
    for (auto l : g.labels(id)) s.labels.push_back(g.label_name(l));
    for (const auto& [k, v] : g.properties(id)) s.props.emplace(g.key_name(k), v);
    return s;
}

// Uniform in [0,1) from the raw engine output, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool numeric(const Scalar& v) { return is_numeric(v); }

double frac_below(double x, double lo, double hi) {
    if (hi <= lo) return x > lo ? 1.0 : 0.0;
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

// Fraction of a bucket [lo, hi] with `distinct` values that satisfies (op, operand),
// assuming uniform spread and uniform frequencies.
double bucket_fraction(double lo, double hi, std::uint64_t distinct, Predicate op, const Operand& operand) {
    auto inside = [&](double x) { return x >= lo && x <= hi; };
    const double d = distinct ? static_cast<double>(distinct) : 1.0;
    auto eq = [&](const Scalar& s) { return numeric(s) && inside(as_double(s)) ? 1.0 / d : 0.0; };
    if (op == Predicate::IN) {
        double f = 0;
        if (auto* list = std::get_if<std::vector<Scalar>>(&operand))
            for (const auto& s : *list) f += eq(s);
        return std::min(f, 1.0);
    }
    const auto* s = std::get_if<Scalar>(&operand);
    if (!s || !numeric(*s)) return 0.0;
    const double x = as_double(*s);
    switch (op) {
        case Predicate::EQ: return eq(*s);
        case Predicate::NEQ: return 1.0 - eq(*s);
        case Predicate::LT: return frac_below(x, lo, hi);
        case Predicate::LEQ: return std::min(1.0, frac_below(x, lo, hi) + eq(*s));
        case Predicate::GT: return 1.0 - std::min(1.0, frac_below(x, lo, hi) + eq(*s));
        case Predicate::GEQ: return 1.0 - frac_below(x, lo, hi);
        default: return 0.0;
    }
}

std::string prefix_of(const std::string& s, std::size_t n) { return s.substr(0, std::min(n, s.size())); }

}  // namespace

std::string_view sample_pattern_name(SamplePattern p) {
    switch (p) {
        case SamplePattern::Id: return "id";
        case SamplePattern::Vertex: return "vertex";
        case SamplePattern::EdgePattern: return "ep";
    }
    return "";
}

SamplePattern parse_sample_pattern(std::string_view s) {
    if (s == "id") return SamplePattern::Id;
    if (s == "vertex" || s == "v") return SamplePattern::Vertex;
    if (s == "ep" || s == "edge_pattern") return SamplePattern::EdgePattern;
    throw ConfigError("unknown sample pattern type '" + std::string(s) + "'");
}

Sample build_sample(const PropertyGraph& g, SamplePattern pt, double pr, std::uint64_t seed) {
    if (!(pr > 0.0 && pr <= 1.0)) throw ConfigError("sample probability must be in (0, 1]");
    Sample s;
    s.pattern = pt;
    s.probability = pr;
    s.seed = seed;
    std::mt19937_64 rng(seed);
    ElementId lo = pt == SamplePattern::EdgePattern ? static_cast<ElementId>(g.num_vertices()) : 0;
    ElementId hi = pt == SamplePattern::Vertex ? static_cast<ElementId>(g.num_vertices()) : static_cast<ElementId>(g.num_ids());
    s.population = hi - lo;
    for (ElementId id = lo; id < hi; ++id) {
        if (unit(rng) >= pr) continue;
        SampleMember m;
        if (pt == SamplePattern::EdgePattern) {
            m.parts = {materialize(g, g.source(id)), materialize(g, id), materialize(g, g.target(id))};
            m.self_loop = g.source(id) == g.target(id);
        } else {
            m.parts = {materialize(g, id)};
        }
        s.members.push_back(std::move(m));
    }
    return s;
}

std::optional<double> Histogram::estimate(Predicate op, const Operand& value) const {
    if (total == 0) return std::nullopt;
    if (domain == HistogramDomain::Numeric) {
        if (op == Predicate::CONTAINS) return 0.0;
        double est = 0;
        for (std::size_t i = 0; i < buckets.size(); ++i) {
            const auto& b = buckets[i];
            if (b.count == 0) continue;
            double hi = b.hi;
            // Equi-width buckets are half-open except the last one.
            if (kind == HistogramKind::EquiWidth && i + 1 < buckets.size() && op == Predicate::EQ) {
                if (const auto* s = std::get_if<Scalar>(&value); s && numeric(*s) && as_double(*s) >= hi) continue;
            }
            est += static_cast<double>(b.count) * bucket_fraction(b.lo, hi, b.distinct, op, value);
        }
        return std::min(est, static_cast<double>(total));
    }
    // String prefix buckets.
    auto eq_count = [&](const Scalar& s) -> double {
        const auto* str = std::get_if<std::string>(&s);
        if (!str) return 0.0;
        auto p = prefix_of(*str, prefix_length);
        for (const auto& b : buckets)
            if (b.prefix == p && b.distinct) return static_cast<double>(b.count) / static_cast<double>(b.distinct);
        return 0.0;
    };
    switch (op) {
        case Predicate::EQ:
        case Predicate::NEQ: {
            const auto* s = std::get_if<Scalar>(&value);
            if (!s) return std::nullopt;
            double eq = eq_count(*s);
            return op == Predicate::EQ ? eq : static_cast<double>(total) - eq;
        }
        case Predicate::IN: {
            const auto* list = std::get_if<std::vector<Scalar>>(&value);
            if (!list) return std::nullopt;
            double n = 0;
            for (const auto& s : *list) n += eq_count(s);
            return std::min(n, static_cast<double>(total));
        }
        case Predicate::LT:
        case Predicate::LEQ:
        case Predicate::GT:
        case Predicate::GEQ: {
            const auto* s = std::get_if<Scalar>(&value);
            const auto* str = s ? std::get_if<std::string>(s) : nullptr;
            if (!str) return 0.0;
            auto p = prefix_of(*str, prefix_length);
            bool below = op == Predicate::LT || op == Predicate::LEQ;
            double n = 0;
            for (const auto& b : buckets) {
                if (b.prefix == p) n += static_cast<double>(b.count) / 2.0;
                else if ((b.prefix < p) == below) n += static_cast<double>(b.count);
            }
            return n;
        }
        default: return std::nullopt;
    }
}

Histogram build_histogram(const PropertyGraph& g, const std::string& key, HistogramKind kind, std::size_t n_buckets) {
    if (n_buckets < 1) throw ConfigError("histogram needs at least one bucket");
    Histogram h;
    h.key = key;
    h.kind = kind;
    h.prefix_length = 2;
    auto k = g.key_id(key);
    if (!k) return h;
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (ElementId id = 0; id < g.num_ids(); ++id) {
        const Scalar* v = g.property(id, *k);
        if (!v) continue;
        if (numeric(*v)) nums.push_back(as_double(*v));
        else if (auto* s = std::get_if<std::string>(v)) strs.push_back(*s);
    }
    if (nums.empty() && !strs.empty()) {
        h.domain = HistogramDomain::StringPrefix;
        std::map<std::string, std::pair<std::uint64_t, std::set<std::string>>> groups;
        for (const auto& s : strs) {
            auto& grp = groups[prefix_of(s, h.prefix_length)];
            ++grp.first;
            grp.second.insert(s);
        }
        for (const auto& [p, grp] : groups) {
            HistogramBucket b;
            b.prefix = p;
            b.count = grp.first;
            b.distinct = grp.second.size();
            h.buckets.push_back(b);
        }
        h.total = strs.size();
        return h;
    }
    if (nums.empty()) return h;
    std::sort(nums.begin(), nums.end());
    h.total = nums.size();
    const double lo = nums.front(), hi = nums.back();
    if (kind == HistogramKind::EquiWidth) {
        std::size_t n = lo == hi ? 1 : n_buckets;
        const double width = (hi - lo) / static_cast<double>(n);
        h.buckets.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            h.buckets[i].lo = lo + width * static_cast<double>(i);
            h.buckets[i].hi = i + 1 == n ? hi : lo + width * static_cast<double>(i + 1);
        }
        double prev = std::nan("");
        std::size_t prev_bucket = n;
        for (double x : nums) {
            std::size_t i = width > 0 ? static_cast<std::size_t>((x - lo) / width) : 0;
            i = std::min(i, n - 1);
            ++h.buckets[i].count;
            if (x != prev || i != prev_bucket) ++h.buckets[i].distinct;
            prev = x;
            prev_bucket = i;
        }
        return h;
    }
    const std::size_t target = (nums.size() + n_buckets - 1) / n_buckets;
    std::size_t i = 0;
    while (i < nums.size()) {
        HistogramBucket b;
        b.lo = nums[i];
        while (i < nums.size() && b.count < target) {
            double x = nums[i];
            ++b.distinct;
            while (i < nums.size() && nums[i] == x) {
                ++b.count;
                ++i;
            }
        }
        b.hi = nums[i - 1];
        h.buckets.push_back(b);
    }
    return h;
}

double MDHistogram::estimate(const std::vector<std::vector<std::pair<Predicate, Operand>>>& preds) const {
    double est = 0;
    for (const auto& [coords, cell] : grid) {
        double f = static_cast<double>(cell.count);
        for (std::size_t a = 0; a < keys.size() && f > 0; ++a) {
            if (a >= preds.size()) break;
            double lo = bounds[a][coords[a]];
            double hi = bounds[a][coords[a] + 1];
            for (const auto& [op, value] : preds[a]) f *= bucket_fraction(lo, hi, cell.distinct[a], op, value);
        }
        est += f;
    }
    return est;
}

MDHistogram build_md_histogram(const PropertyGraph& g, const std::vector<std::string>& keys, std::size_t n_buckets_per_axis) {
    if (keys.size() < 2 || keys.size() > 3) throw ConfigError("multidimensional histograms take 2 or 3 keys");
    if (n_buckets_per_axis < 1) throw ConfigError("histogram needs at least one bucket");
    MDHistogram h;
    h.keys = keys;
    std::vector<KeyId> ids;
    for (const auto& k : keys) {
        auto id = g.key_id(k);
        if (!id) return h;
        ids.push_back(*id);
    }
    std::vector<std::vector<double>> rows;
    for (ElementId e = 0; e < g.num_ids(); ++e) {
        std::vector<double> row;
        for (auto k : ids) {
            const Scalar* v = g.property(e, k);
            if (!v || !numeric(*v)) break;
            row.push_back(as_double(*v));
        }
        if (row.size() == ids.size()) rows.push_back(std::move(row));
    }
    h.bounds.resize(keys.size());
    std::vector<double> width(keys.size());
    std::vector<std::size_t> nb(keys.size());
    for (std::size_t a = 0; a < keys.size(); ++a) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& r : rows) {
            lo = std::min(lo, r[a]);
            hi = std::max(hi, r[a]);
        }
        if (rows.empty()) lo = hi = 0;
        nb[a] = lo == hi ? 1 : n_buckets_per_axis;
        width[a] = (hi - lo) / static_cast<double>(nb[a]);
        for (std::size_t i = 0; i <= nb[a]; ++i) h.bounds[a].push_back(i == nb[a] ? hi : lo + width[a] * static_cast<double>(i));
    }
    std::map<std::vector<std::uint32_t>, std::vector<std::set<double>>> seen;
    for (const auto& r : rows) {
        std::vector<std::uint32_t> c(keys.size());
        for (std::size_t a = 0; a < keys.size(); ++a) {
            std::size_t i = width[a] > 0 ? static_cast<std::size_t>((r[a] - h.bounds[a][0]) / width[a]) : 0;
            c[a] = static_cast<std::uint32_t>(std::min(i, nb[a] - 1));
        }
        auto& cell = h.grid[c];
        ++cell.count;
        auto& s = seen[c];
        s.resize(keys.size());
        for (std::size_t a = 0; a < keys.size(); ++a) s[a].insert(r[a]);
    }
    for (auto& [c, cell] : h.grid) {
        cell.distinct.clear();
        for (const auto& s : seen[c]) cell.distinct.push_back(s.size());
    }
    h.total = rows.size();
    return h;
}

}  // namespace cardest
