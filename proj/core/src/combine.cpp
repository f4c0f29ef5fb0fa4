#include "cardest/combine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cardest/errors.hpp"
#include "cardest/pets.hpp"

namespace cardest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDepthCap = 2;

class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n) : w_((n + 63) / 64, 0) {}

    void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1; }
    bool empty() const {
        return std::all_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x == 0; });
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto x : w_) n += static_cast<std::size_t>(__builtin_popcountll(x));
        return n;
    }
    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] &= o.w_[i];
        return r;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    bool operator==(const Bits& o) const { return w_ == o.w_; }
    std::size_t size() const { return w_.size() * 64; }

private:
    std::vector<std::uint64_t> w_;
};

struct Universe {
    std::map<Constraint, std::size_t> index;

    explicit Universe(const PES& pes, const QueryPattern& q) {
        for (const auto& pe : pes)
            for (const auto& c : implied_closure(pe.constraints, q)) index.emplace(c, 0);
        std::size_t i = 0;
        for (auto& [c, idx] : index) idx = i++;
    }
    std::size_t size() const { return index.size(); }
    Bits of(const ConstraintSet& cs) const {
        Bits b(size());
        for (const auto& c : cs) b.set(index.at(c));
        return b;
    }
};

struct Item {
    Bits cs;
    Bits closure;
    double s = 1.0;
    std::size_t n = 0;
    double dev = 1.0;
    std::string key;
    std::string tag;
};

struct Ctx {
    SortStrategy strategy;
    const std::vector<Item>* all;
    std::vector<double> singles;  // NaN when no singleton PE exists
    std::size_t width;
};

double product_of_singles(const Ctx& ctx, const Bits& b) {
    double p = 1.0;
    for (std::size_t i = 0; i < ctx.width; ++i)
        if (b.test(i) && !std::isnan(ctx.singles[i])) p *= ctx.singles[i];
    return p;
}

bool tie_less(const Item& a, const Item& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.s != b.s) return a.s < b.s;
    return a.tag < b.tag;
}

bool static_less(SortStrategy st, const Item& a, const Item& b) {
    auto cmp = [](auto x, auto y) { return x < y ? -1 : (y < x ? 1 : 0); };
    int primary = 0, secondary = 0;
    switch (st) {
        case SortStrategy::SaNd: primary = cmp(a.s, b.s); secondary = cmp(b.n, a.n); break;
        case SortStrategy::Sd: primary = cmp(b.s, a.s); break;
        case SortStrategy::NdSa: primary = cmp(b.n, a.n); secondary = cmp(a.s, b.s); break;
        case SortStrategy::NdSd: primary = cmp(b.n, a.n); secondary = cmp(b.s, a.s); break;
        case SortStrategy::NaSd: primary = cmp(a.n, b.n); secondary = cmp(b.s, a.s); break;
        case SortStrategy::NaSa: primary = cmp(a.n, b.n); secondary = cmp(a.s, b.s); break;
        case SortStrategy::Di: primary = cmp(b.dev, a.dev); secondary = cmp(a.s, b.s); break;
        default: break;
    }
    if (primary) return primary < 0;
    if (secondary) return secondary < 0;
    return tie_less(a, b);
}

double cond_indep(const Ctx& ctx, std::vector<const Item*> items, int depth, CombineTrace* trace);

double sel_est(const Ctx& ctx, const Bits& inter, int depth) {
    if (depth > kDepthCap) return product_of_singles(ctx, inter);
    std::vector<const Item*> sub;
    Bits covered(ctx.width);
    for (const auto& it : *ctx.all)
        if (it.cs.subset_of(inter)) {
            sub.push_back(&it);
            covered |= it.cs;
        }
    std::vector<Item> extra;
    extra.reserve(ctx.width);
    for (std::size_t i = 0; i < ctx.width; ++i) {
        if (!inter.test(i) || covered.test(i) || std::isnan(ctx.singles[i])) continue;
        Item it;
        it.cs = Bits(ctx.width);
        it.cs.set(i);
        it.closure = it.cs;
        it.s = ctx.singles[i];
        it.n = 1;
        it.key = "#" + std::to_string(i);
        extra.push_back(std::move(it));
    }
    for (const auto& it : extra) sub.push_back(&it);
    return cond_indep(ctx, std::move(sub), depth, nullptr);
}

double cond_indep(const Ctx& ctx, std::vector<const Item*> items, int depth, CombineTrace* trace) {
    const bool greedy = ctx.strategy == SortStrategy::MoNd || ctx.strategy == SortStrategy::MoDi;
    if (!greedy)
        std::sort(items.begin(), items.end(), [&](const Item* a, const Item* b) { return static_less(ctx.strategy, *a, *b); });
    Bits done(ctx.width);
    double sel = 1.0;
    std::vector<bool> used(items.size(), false);
    for (std::size_t step = 0; step < items.size(); ++step) {
        std::size_t pick = step;
        if (greedy) {
            pick = items.size();
            std::size_t best_overlap = 0;
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (used[i]) continue;
                std::size_t ov = (items[i]->closure & done).count();
                if (pick == items.size()) {
                    pick = i;
                    best_overlap = ov;
                    continue;
                }
                const Item& a = *items[i];
                const Item& b = *items[pick];
                bool better;
                if (ov != best_overlap) better = ov > best_overlap;
                else if (ctx.strategy == SortStrategy::MoNd && a.n != b.n) better = a.n > b.n;
                else if (ctx.strategy == SortStrategy::MoDi && a.dev != b.dev) better = a.dev > b.dev;
                else better = tie_less(a, b);
                if (better) {
                    pick = i;
                    best_overlap = ov;
                }
            }
            used[pick] = true;
        }
        const Item& it = *items[pick];
        Bits inter = it.closure & done;
        double f = 1.0;
        std::string note;
        if (inter.empty()) {
            f = it.s;
            note = "disjoint";
        } else if (inter == it.closure) {
            note = "covered";
        } else {
            double est = sel_est(ctx, inter, depth + 1);
            double denom = std::max(it.s, est);
            f = denom > 0 ? it.s / denom : 0.0;
            note = "overlap";
        }
        sel *= f;
        done |= it.closure;
        if (trace) trace->factors.push_back({it.key, f, note});
    }
    return std::clamp(sel, 0.0, 1.0);
}

std::vector<Item> make_items(const PES& pes, const Universe& u, const QueryPattern& q, const SingletonMap& singles) {
    std::vector<Item> items;
    for (const auto& pe : pes) {
        Item it;
        it.cs = u.of(pe.constraints);
        it.closure = u.of(implied_closure(pe.constraints, q));
        it.s = pe.selectivity;
        it.n = pe.constraints.size();
        it.dev = deviation_from_independence(pe, singles);
        it.key = set_key(pe.constraints);
        it.tag = pe.tag;
        items.push_back(std::move(it));
    }
    return items;
}

}  // namespace

SortStrategy parse_sort_strategy(std::string_view tag) {
    static const std::pair<std::string_view, SortStrategy> table[] = {
        {"SaNd", SortStrategy::SaNd}, {"Sd", SortStrategy::Sd},     {"NdSa", SortStrategy::NdSa},
        {"NdSd", SortStrategy::NdSd}, {"NaSd", SortStrategy::NaSd}, {"NaSa", SortStrategy::NaSa},
        {"Di", SortStrategy::Di},     {"MoNd", SortStrategy::MoNd}, {"MoDi", SortStrategy::MoDi}};
    for (const auto& [name, s] : table)
        if (name == tag) return s;
    throw ConfigError("unknown sort strategy '" + std::string(tag) + "'");
}

std::string_view sort_strategy_name(SortStrategy s) {
    switch (s) {
        case SortStrategy::SaNd: return "SaNd";
        case SortStrategy::Sd: return "Sd";
        case SortStrategy::NdSa: return "NdSa";
        case SortStrategy::NdSd: return "NdSd";
        case SortStrategy::NaSd: return "NaSd";
        case SortStrategy::NaSa: return "NaSa";
        case SortStrategy::Di: return "Di";
        case SortStrategy::MoNd: return "MoNd";
        case SortStrategy::MoDi: return "MoDi";
    }
    return "?";
}

SingletonMap singleton_map(const PES& pes) {
    SingletonMap out;
    // First singleton per constraint in (trust, s) order wins.
    std::vector<const PartialEstimate*> ones;
    for (const auto& pe : pes)
        if (pe.constraints.size() == 1) ones.push_back(&pe);
    std::stable_sort(ones.begin(), ones.end(), [](const PartialEstimate* a, const PartialEstimate* b) {
        if (trust_rank(a->technique) != trust_rank(b->technique)) return trust_rank(a->technique) < trust_rank(b->technique);
        return a->selectivity < b->selectivity;
    });
    for (const auto* pe : ones) out.emplace(*pe->constraints.begin(), pe->selectivity);
    return out;
}

PES make_complete(const PES& pes, const QueryPattern& q, const StatisticsCatalog& cat) {
    PES out = pes;
    ConstraintSet covered;
    for (const auto& pe : pes) covered.insert(pe.constraints.begin(), pe.constraints.end());
    for (const auto& c : extract_constraints(q))
        if (!covered.count(c)) out.push_back(individual_estimate(c, cat));
    return out;
}

double deviation_from_independence(const PartialEstimate& pe, const SingletonMap& singles) {
    if (pe.constraints.size() <= 1) return 1.0;
    double prod = 1.0;
    for (const auto& c : pe.constraints) {
        auto it = singles.find(c);
        if (it != singles.end()) prod *= it->second;
    }
    const double s = pe.selectivity;
    if (s == 0 && prod == 0) return 1.0;
    if (s == 0 || prod == 0) return kInf;
    return std::max(s / prod, prod / s);
}

double combine_cond_indep(const PES& cpes, const QueryPattern& q, SortStrategy strategy, CombineTrace* trace) {
    if (cpes.empty()) return 1.0;
    Universe u(cpes, q);
    auto singles = singleton_map(cpes);
    auto items = make_items(cpes, u, q, singles);
    Ctx ctx{strategy, &items, std::vector<double>(u.size(), std::nan("")), u.size()};
    for (const auto& [c, s] : singles) ctx.singles[u.index.at(c)] = s;
    std::vector<const Item*> ptrs;
    for (const auto& it : items) ptrs.push_back(&it);
    return cond_indep(ctx, std::move(ptrs), 0, trace);
}

MaxEntResult combine_max_ent(const PES& cpes, const QueryPattern& q, const MaxEntOptions& opt, CombineTrace* trace) {
    if (opt.mps < 1) throw ConfigError("maxEnt needs mps >= 1");
    MaxEntResult res;
    if (cpes.empty()) return res;
    const int mps = std::min(opt.mps, kMaxEntHardCap);

    ConstraintSet universe;
    for (const auto& pe : cpes) universe.insert(pe.constraints.begin(), pe.constraints.end());
    for (const auto& pe : cpes)
        if (pe.selectivity <= 0) {
            res.selectivity = 0.0;
            if (trace) trace->factors.push_back({set_key(pe.constraints), 0.0, "zero PE"});
            return res;
        }
    // A PE over every constraint fixes the all-true mass of any feasible solution.
    const PartialEstimate* full = nullptr;
    for (const auto& pe : cpes)
        if (pe.constraints == universe && (!full || pe.selectivity < full->selectivity)) full = &pe;
    if (full) {
        res.selectivity = std::min(full->selectivity, 1.0);
        if (trace) trace->factors.push_back({set_key(full->constraints), res.selectivity, "full cover"});
        return res;
    }

    std::vector<const PartialEstimate*> order;
    for (const auto& pe : cpes) order.push_back(&pe);
    std::stable_sort(order.begin(), order.end(), [](const PartialEstimate* a, const PartialEstimate* b) {
        if (a->constraints.size() != b->constraints.size()) return a->constraints.size() > b->constraints.size();
        return set_key(a->constraints) < set_key(b->constraints);
    });

    struct Partition {
        ConstraintSet vars;
        std::vector<const PartialEstimate*> pes;
    };
    std::vector<Partition> parts;
    std::map<Constraint, std::size_t> home;
    for (const auto* pe : order) {
        if (pe->constraints.size() > static_cast<std::size_t>(mps)) {
            ++res.dropped;
            continue;
        }
        std::set<std::size_t> touched;
        for (const auto& c : pe->constraints)
            if (auto it = home.find(c); it != home.end()) touched.insert(it->second);
        if (touched.size() > 1) {
            ++res.dropped;
            continue;
        }
        std::size_t p;
        if (touched.empty()) {
            p = parts.size();
            parts.emplace_back();
        } else {
            p = *touched.begin();
            ConstraintSet merged = parts[p].vars;
            merged.insert(pe->constraints.begin(), pe->constraints.end());
            if (merged.size() > static_cast<std::size_t>(mps)) {
                ++res.dropped;
                continue;
            }
        }
        parts[p].vars.insert(pe->constraints.begin(), pe->constraints.end());
        parts[p].pes.push_back(pe);
        for (const auto& c : pe->constraints) home[c] = p;
    }
    // Constraints only covered by dropped PEs fall back to their singleton.
    auto singles = singleton_map(cpes);
    double context = 1.0;
    for (const auto& c : universe) {
        if (home.count(c)) continue;
        if (auto it = singles.find(c); it != singles.end()) {
            context *= it->second;
            if (trace) trace->factors.push_back({c.key(), it->second, "context singleton"});
        } else if (trace) {
            trace->notes.push_back("no estimate left for " + c.key());
        }
    }

    double sel = context;
    for (const auto& part : parts) {
        std::vector<Constraint> vars(part.vars.begin(), part.vars.end());
        const std::size_t k = vars.size();
        const std::size_t n_atoms = std::size_t{1} << k;
        std::vector<std::pair<std::size_t, double>> masks;
        for (const auto* pe : part.pes) {
            std::size_t m = 0;
            for (const auto& c : pe->constraints)
                m |= std::size_t{1} << (std::lower_bound(vars.begin(), vars.end(), c) - vars.begin());
            masks.emplace_back(m, pe->selectivity);
        }
        // Atoms ruled out outright: PE i inside PE j with equal s, or s = 1.
        std::vector<char> allowed(n_atoms, 1);
        for (const auto& [mi, si] : masks)
            for (const auto& [mj, sj] : masks) {
                const bool forced = (mi != mj && (mi & mj) == mi && std::abs(si - sj) <= 1e-12 * std::max(si, sj)) ||
                                    (mi == mj && si >= 1.0);
                if (!forced) continue;
                for (std::size_t x = 0; x < n_atoms; ++x)
                    if ((x & mi) == mi && (x & mj) != mj) allowed[x] = 0;
                if (si >= 1.0)
                    for (std::size_t x = 0; x < n_atoms; ++x)
                        if ((x & mi) != mi) allowed[x] = 0;
            }
        // Implied constraints inside the partition: the implicant cannot hold without them.
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<Constraint> implied;
            for (const auto& c : implied_closure({vars[i]}, q))
                if (!(c == vars[i])) implied.push_back(c);
            for (const auto& c : implied) {
                auto it = std::lower_bound(vars.begin(), vars.end(), c);
                if (it == vars.end() || !(*it == c)) continue;
                const std::size_t a = std::size_t{1} << i, b = std::size_t{1} << (it - vars.begin());
                for (std::size_t x = 0; x < n_atoms; ++x)
                    if ((x & a) && !(x & b)) allowed[x] = 0;
            }
        }
        const auto n_allowed = static_cast<double>(std::count(allowed.begin(), allowed.end(), 1));
        std::vector<double> p(n_atoms, 0.0);
        for (std::size_t x = 0; x < n_atoms; ++x)
            if (allowed[x]) p[x] = 1.0 / n_allowed;
        double residual = kInf;
        for (int iter = 0; iter < opt.max_iter && residual >= opt.tol; ++iter) {
            for (const auto& [m, s] : masks) {
                double in = 0;
                for (std::size_t x = 0; x < n_atoms; ++x)
                    if ((x & m) == m) in += p[x];
                const double a = in > 0 ? s / in : 1.0;
                const double b = in < 1 ? (1 - s) / (1 - in) : 1.0;
                for (std::size_t x = 0; x < n_atoms; ++x) p[x] *= (x & m) == m ? a : b;
            }
            residual = 0;
            for (const auto& [m, s] : masks) {
                double in = 0;
                for (std::size_t x = 0; x < n_atoms; ++x)
                    if ((x & m) == m) in += p[x];
                residual = std::max(residual, std::abs(in - s));
            }
        }
        res.residual = std::max(res.residual, residual);
        if (!(residual < opt.tol)) res.converged = false;
        const double mass = p[n_atoms - 1];
        sel *= mass;
        if (trace) trace->factors.push_back({set_key(part.vars), mass, "partition of " + std::to_string(k)});
    }
    if (res.dropped && trace) trace->notes.push_back(std::to_string(res.dropped) + " PEs did not fit a partition");
    res.selectivity = std::clamp(sel, 0.0, 1.0);
    return res;
}

BoundsResult combine_bounds(const PES& cpes, const QueryPattern&, std::size_t exact_limit) {
    BoundsResult res;
    std::vector<const PartialEstimate*> pes;
    for (const auto& pe : cpes) pes.push_back(&pe);
    std::sort(pes.begin(), pes.end(), [](const PartialEstimate* a, const PartialEstimate* b) {
        if (a->selectivity != b->selectivity) return a->selectivity < b->selectivity;
        return set_key(a->constraints) < set_key(b->constraints);
    });
    std::vector<std::set<std::string>> ids;
    for (const auto* pe : pes) ids.push_back(ids_of(pe->constraints));
    auto disjoint = [](const std::set<std::string>& a, const std::set<std::string>& b) {
        return std::none_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) > 0; });
    };

    double upper = 1.0;
    if (pes.size() <= exact_limit) {
        std::vector<std::size_t> chosen;
        std::function<void(std::size_t, double)> dfs = [&](std::size_t i, double prod) {
            if (i == pes.size()) {
                upper = std::min(upper, prod);
                return;
            }
            bool ok = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t j) { return disjoint(ids[i], ids[j]); });
            if (ok) {
                chosen.push_back(i);
                dfs(i + 1, prod * pes[i]->selectivity);
                chosen.pop_back();
            }
            dfs(i + 1, prod);
        };
        dfs(0, 1.0);
    } else {
        res.greedy = true;
        std::set<std::string> used;
        for (std::size_t i = 0; i < pes.size(); ++i) {
            if (!disjoint(ids[i], used)) continue;
            upper *= pes[i]->selectivity;
            used.insert(ids[i].begin(), ids[i].end());
        }
        for (const auto* pe : pes) upper = std::min(upper, pe->selectivity);
    }
    res.upper = std::clamp(upper, 0.0, 1.0);

    long double slack = 0;
    for (std::size_t i = 0; i < pes.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pes.size() && !dominated; ++j) {
            if (i == j || !is_subset(pes[i]->constraints, pes[j]->constraints)) continue;
            dominated = pes[i]->constraints.size() < pes[j]->constraints.size() || j < i;
        }
        if (!dominated) slack += 1.0L - static_cast<long double>(pes[i]->selectivity);
    }
    res.lower = static_cast<double>(std::max(0.0L, 1.0L - slack));
    res.lower = std::min(res.lower, res.upper);
    return res;
}

double selectivity_to_cardinality(double s, std::size_t n_query_ids, std::uint64_t n_ids) {
    if (n_query_ids == 0) return s;
    return static_cast<double>(static_cast<long double>(s) *
                               std::pow(static_cast<long double>(n_ids), static_cast<long double>(n_query_ids)));
}

}  // namespace cardest
