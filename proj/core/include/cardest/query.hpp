#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cardest/constraint.hpp"

namespace cardest {

struct PropConstraint {
    std::string id;
    std::string key;
    Predicate op = Predicate::EQ;
    Operand value;
};

struct QueryVertex {
    std::string id;
    std::vector<std::string> labels;
};

struct QueryEdge {
    std::string id;
    std::string src;
    std::string trg;
    std::vector<std::string> labels;
};

class QueryPattern {
public:
    std::vector<QueryVertex> vertices;
    std::vector<QueryEdge> edges;
    // A list, several predicates on one (id, key) are allowed.
    std::vector<PropConstraint> props;

    std::size_t size() const { return vertices.size() + edges.size(); }
    bool empty() const { return size() == 0; }
    bool has_vertex(std::string_view id) const;
    bool has_edge(std::string_view id) const;
    const QueryVertex* vertex(std::string_view id) const;
    const QueryEdge* edge(std::string_view id) const;
    std::vector<std::string> labels_of(std::string_view id) const;
    std::vector<std::string> ids() const;

    // Throws ParseError on dangling or duplicate ids.
    void validate() const;
};

// One alternative of an anyOf group: extra labels/props on an existing id.
struct Alternative {
    std::string id;
    std::vector<std::string> labels;
    std::vector<PropConstraint> props;
};

struct QueryDocument {
    std::string id;
    QueryPattern pattern;
    std::vector<std::vector<Alternative>> any_of;
};

QueryDocument parse_query_document(std::string_view text);
QueryPattern parse_query(std::string_view text);
QueryDocument load_query_document(const std::string& path);
std::string query_to_json(const QueryDocument& doc);
std::string query_to_json(const QueryPattern& q);

ConstraintSet extract_constraints(const QueryPattern& q);
ConstraintSet implied_closure(const ConstraintSet& s, const QueryPattern& q);

enum class PatternClass { Edge, Chain, SourceStar, TargetStar, Star, CsPattern, TargetCsPattern, PerId, PerEdgePattern };

struct SubpatternClass {
    PatternClass kind = PatternClass::Edge;
    int size = 1;
};

struct Subpattern {
    PatternClass kind = PatternClass::Edge;
    // Star/cs center or the id of a per-id group.
    std::string center;
    // Chains: in walk order. Stars: sorted.
    std::vector<std::string> edges;
    // Chains: v0..vn. Stars: the leaf of each arm, aligned with edges.
    std::vector<std::string> vertices;
    ConstraintSet constraints;
};

// Stars are sets of edges at a common center with distinct leaves (self loops excluded);
// chains are directed simple paths. Star classes emit every size-n subset.
std::vector<Subpattern> enumerate_subpatterns(const QueryPattern& q, SubpatternClass cls);

// vertex/edge/src/trg constraints for the given query edges and their endpoints.
ConstraintSet topological_constraints(const QueryPattern& q, const std::vector<std::string>& edges);

}  // namespace cardest
