#include "cardest/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cardest/errors.hpp"

namespace cardest {

namespace {

enum class VarType { Any, Vertex, Edge };

struct PropTest {
    KeyId key;
    Predicate op;
    const Operand* operand;
};

struct Var {
    VarType type = VarType::Any;
    bool impossible = false;
    std::vector<LabelId> labels;
    std::vector<KeyId> keys;
    std::vector<PropTest> preds;
    // Edge vars: (vertex var, is source). Vertex vars: (edge var, is source).
    std::vector<std::pair<int, bool>> links;
};

struct Candidates {
    std::span<const ElementId> a, b;
    ElementId lo = 0, hi = 0;
    ElementId single = kNoElement;
    std::size_t size() const { return a.size() + b.size() + (hi - lo) + (single != kNoElement ? 1 : 0); }
    template <typename F>
    void for_each(F&& f) const {
        if (single != kNoElement) f(single);
        for (auto x : a) f(x);
        for (auto x : b) f(x);
        for (auto x = lo; x < hi; ++x) f(x);
    }
};

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw ResourceError("match count overflows 64 bits");
    return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw ResourceError("match count overflows 64 bits");
    return r;
}

class Search {
public:
    Search(const PropertyGraph& g, const ConstraintSet& cs, Semantics sem, std::uint64_t budget)
        : g_(g), iso_(sem == Semantics::Isomorphic), budget_(budget) {
        for (const auto& c : cs) {
            int a = var(c.id());
            switch (c.kind()) {
                case ConstraintKind::Vertex: require(a, VarType::Vertex); break;
                case ConstraintKind::Edge: require(a, VarType::Edge); break;
                case ConstraintKind::Src:
                case ConstraintKind::Trg: {
                    int e = var(c.edge_id());
                    bool is_src = c.kind() == ConstraintKind::Src;
                    require(a, VarType::Vertex);
                    require(e, VarType::Edge);
                    vars_[e].links.emplace_back(a, is_src);
                    vars_[a].links.emplace_back(e, is_src);
                    break;
                }
                case ConstraintKind::HasLabel:
                    if (auto l = g.label_id(c.name())) vars_[a].labels.push_back(*l);
                    else vars_[a].impossible = true;
                    break;
                case ConstraintKind::HasKey:
                    if (auto k = g.key_id(c.name())) vars_[a].keys.push_back(*k);
                    else vars_[a].impossible = true;
                    break;
                case ConstraintKind::PropValue:
                    if (auto k = g.key_id(c.name())) vars_[a].preds.push_back({*k, c.op(), &c.operand()});
                    else vars_[a].impossible = true;
                    break;
            }
        }
        asg_.assign(vars_.size(), kNoElement);
    }

    std::uint64_t run() {
        if (vars_.empty()) return 1;
        for (const auto& v : vars_)
            if (v.impossible) return 0;
        if (iso_) {
            std::vector<int> all(vars_.size());
            std::iota(all.begin(), all.end(), 0);
            return search(all, 0);
        }
        std::uint64_t total = 1;
        for (const auto& comp : components()) {
            total = mul(total, search(comp, 0));
            if (total == 0) break;
        }
        return total;
    }

private:
    int var(const std::string& name) {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it != names_.end()) return static_cast<int>(it - names_.begin());
        names_.push_back(name);
        vars_.emplace_back();
        return static_cast<int>(vars_.size() - 1);
    }

    void require(int v, VarType t) {
        if (vars_[v].type != VarType::Any && vars_[v].type != t) vars_[v].impossible = true;
        vars_[v].type = t;
    }

    std::vector<std::vector<int>> components() const {
        std::vector<int> comp(vars_.size(), -1);
        std::vector<std::vector<int>> out;
        for (int s = 0; s < static_cast<int>(vars_.size()); ++s) {
            if (comp[s] >= 0) continue;
            out.emplace_back();
            std::vector<int> stack{s};
            comp[s] = static_cast<int>(out.size() - 1);
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                out.back().push_back(x);
                for (auto [y, _] : vars_[x].links)
                    if (comp[y] < 0) {
                        comp[y] = comp[s];
                        stack.push_back(y);
                    }
            }
        }
        return out;
    }

    Candidates candidates(int x) const {
        const Var& v = vars_[x];
        Candidates best;
        bool bound = false;
        for (auto [y, is_src] : v.links) {
            if (asg_[y] == kNoElement) continue;
            Candidates c;
            if (v.type == VarType::Vertex) {
                c.single = is_src ? g_.source(asg_[y]) : g_.target(asg_[y]);
            } else if (!v.labels.empty()) {
                c.a = is_src ? g_.out_edges(asg_[y], v.labels[0]) : g_.in_edges(asg_[y], v.labels[0]);
            } else {
                c.a = is_src ? g_.out_edges(asg_[y]) : g_.in_edges(asg_[y]);
            }
            if (!bound || c.size() < best.size()) best = c;
            bound = true;
        }
        if (bound) return best;
        const auto nv = static_cast<ElementId>(g_.num_vertices());
        const auto ni = static_cast<ElementId>(g_.num_ids());
        Candidates c;
        if (!v.labels.empty()) {
            if (v.type != VarType::Edge) c.a = g_.vertices_with_label(v.labels[0]);
            if (v.type != VarType::Vertex) c.b = g_.edges_with_label(v.labels[0]);
        } else {
            c.lo = v.type == VarType::Edge ? nv : 0;
            c.hi = v.type == VarType::Vertex ? nv : ni;
        }
        return c;
    }

    bool accepts(int x, ElementId e) const {
        const Var& v = vars_[x];
        if (v.type == VarType::Vertex && !g_.is_vertex(e)) return false;
        if (v.type == VarType::Edge && !g_.is_edge(e)) return false;
        for (auto l : v.labels)
            if (!g_.has_label(e, l)) return false;
        for (auto k : v.keys)
            if (!g_.property(e, k)) return false;
        for (const auto& p : v.preds) {
            const Scalar* val = g_.property(e, p.key);
            if (!val || !eval_predicate(*val, p.op, *p.operand)) return false;
        }
        for (auto [y, is_src] : v.links) {
            if (asg_[y] == kNoElement) continue;
            ElementId edge = v.type == VarType::Edge ? e : asg_[y];
            ElementId vert = v.type == VarType::Edge ? asg_[y] : e;
            if ((is_src ? g_.source(edge) : g_.target(edge)) != vert) return false;
        }
        if (iso_)
            for (auto a : asg_)
                if (a == e) return false;
        return true;
    }

    std::uint64_t search(const std::vector<int>& comp, std::size_t assigned) {
        if (assigned == comp.size()) return 1;
        int pick = -1;
        Candidates best;
        for (int x : comp) {
            if (asg_[x] != kNoElement) continue;
            auto c = candidates(x);
            if (pick < 0 || c.size() < best.size()) {
                pick = x;
                best = c;
                if (c.size() <= 1) break;
            }
        }
        std::uint64_t total = 0;
        best.for_each([&](ElementId e) {
            if (++expansions_ > budget_) throw OracleBudgetError("oracle budget of " + std::to_string(budget_) + " expansions exceeded");
            if (!accepts(pick, e)) return;
            asg_[pick] = e;
            total = add(total, search(comp, assigned + 1));
            asg_[pick] = kNoElement;
        });
        return total;
    }

    const PropertyGraph& g_;
    bool iso_;
    std::uint64_t budget_;
    std::uint64_t expansions_ = 0;
    std::vector<std::string> names_;
    std::vector<Var> vars_;
    std::vector<ElementId> asg_;
};

}  // namespace

bool check_constraint(const PropertyGraph& g, const Mapping& m, const Constraint& c) {
    auto it = m.find(c.id());
    if (it == m.end()) return false;
    const ElementId x = it->second;
    if (x >= g.num_ids()) return false;
    switch (c.kind()) {
        case ConstraintKind::Vertex: return g.is_vertex(x);
        case ConstraintKind::Edge: return g.is_edge(x);
        case ConstraintKind::Src:
        case ConstraintKind::Trg: {
            auto e = m.find(c.edge_id());
            if (e == m.end() || !g.is_edge(e->second) || !g.is_vertex(x)) return false;
            return (c.kind() == ConstraintKind::Src ? g.source(e->second) : g.target(e->second)) == x;
        }
        case ConstraintKind::HasLabel: {
            auto l = g.label_id(c.name());
            return l && g.has_label(x, *l);
        }
        case ConstraintKind::HasKey: {
            auto k = g.key_id(c.name());
            return k && g.property(x, *k);
        }
        case ConstraintKind::PropValue: {
            auto k = g.key_id(c.name());
            const Scalar* v = k ? g.property(x, *k) : nullptr;
            return v && eval_predicate(*v, c.op(), c.operand());
        }
    }
    return false;
}

std::uint64_t count_satisfying(const PropertyGraph& g, const ConstraintSet& cs, Semantics sem, std::uint64_t budget) {
    return Search(g, cs, sem, budget).run();
}

std::uint64_t exact_matches(const PropertyGraph& g, const QueryPattern& q, Semantics sem, std::uint64_t budget) {
    return count_satisfying(g, extract_constraints(q), sem, budget);
}

double exact_selectivity(const PropertyGraph& g, const ConstraintSet& cs, std::uint64_t budget) {
    auto n = count_satisfying(g, cs, Semantics::Homomorphic, budget);
    if (n == 0) return 0.0;
    return static_cast<double>(n) / std::pow(static_cast<double>(g.num_ids()), static_cast<double>(ids_of(cs).size()));
}

}  // namespace cardest
