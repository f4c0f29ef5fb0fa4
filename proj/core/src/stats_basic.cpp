#include <algorithm>

#include "cardest/stats.hpp"

namespace cardest {

std::string prop_triple_key(const std::string& key, Predicate op, const Operand& value) {
    return key + " " + std::string(predicate_symbol(op)) + " " + operand_to_string(value);
}

BasicStats build_basic(const PropertyGraph& g, const std::vector<PropTriple>& exact_triples) {
    BasicStats b;
    b.n_vertices = g.num_vertices();
    b.n_edges = g.num_edges();
    b.n_ids = g.num_ids();
    for (ElementId id = 0; id < g.num_ids(); ++id) {
        for (auto l : g.labels(id)) {
            auto& lc = b.label_sel[g.label_name(l)];
            (g.is_vertex(id) ? lc.vertices : lc.edges) += 1;
        }
        for (const auto& [k, v] : g.properties(id)) b.key_sel[g.key_name(k)] += 1;
    }
    for (const auto& t : exact_triples) {
        std::uint64_t n = 0;
        if (auto k = g.key_id(t.key)) {
            for (ElementId id = 0; id < g.num_ids(); ++id) {
                const Scalar* v = g.property(id, *k);
                if (v && eval_predicate(*v, t.op, t.value)) ++n;
            }
        }
        b.prop_exact[prop_triple_key(t.key, t.op, t.value)] = n;
    }
    return b;
}

}  // namespace cardest
