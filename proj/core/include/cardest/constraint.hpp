#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cardest/value.hpp"

namespace cardest {

enum class ConstraintKind { Vertex, Edge, Src, Trg, HasLabel, HasKey, PropValue };

// Atom of estimation. Ordered and hashed by its canonical key, e.g.
// src(q1,q2), hasLabel(q1,person), propValue(q1,age,>,30).
class Constraint {
public:
    static Constraint vertex(std::string id);
    static Constraint edge(std::string id);
    static Constraint src(std::string vertex, std::string edge);
    static Constraint trg(std::string vertex, std::string edge);
    static Constraint has_label(std::string id, std::string label);
    static Constraint has_key(std::string id, std::string key);
    static Constraint prop_value(std::string id, std::string key, Predicate op, Operand value);

    ConstraintKind kind() const { return kind_; }
    // Subject id; the vertex for src/trg.
    const std::string& id() const { return id_; }
    // Edge id of src/trg, empty otherwise.
    const std::string& edge_id() const { return edge_; }
    // Label for hasLabel, key for hasKey/propValue.
    const std::string& name() const { return name_; }
    Predicate op() const { return op_; }
    const Operand& operand() const { return operand_; }

    const std::string& key() const { return key_; }
    std::vector<std::string> ids() const;
    bool is_data() const { return kind_ >= ConstraintKind::HasLabel; }
    bool is_topological() const { return !is_data(); }

    friend bool operator==(const Constraint& a, const Constraint& b) { return a.key_ == b.key_; }
    friend std::strong_ordering operator<=>(const Constraint& a, const Constraint& b) { return a.key_ <=> b.key_; }

private:
    Constraint(ConstraintKind kind, std::string id, std::string edge, std::string name, Predicate op, Operand operand);

    ConstraintKind kind_;
    std::string id_;
    std::string edge_;
    std::string name_;
    Predicate op_ = Predicate::EQ;
    Operand operand_;
    std::string key_;
};

using ConstraintSet = std::set<Constraint>;

std::set<std::string> ids_of(const ConstraintSet& cs);
std::string set_key(const ConstraintSet& cs);
bool is_subset(const ConstraintSet& a, const ConstraintSet& b);

enum class Technique { Exact, Synopsis, CharSets, SysR, Sampling, WanderJoin, Histogram, MDHistogram, Sketch, Implication, Default };

std::string_view technique_name(Technique t);
// Lower is more trusted.
int trust_rank(Technique t);

struct PartialEstimate {
    ConstraintSet constraints;
    double selectivity = 1.0;
    Technique technique = Technique::Default;
    std::string tag;
    bool low_confidence = false;
};

using PES = std::vector<PartialEstimate>;

}  // namespace cardest

template <>
struct std::hash<cardest::Constraint> {
    std::size_t operator()(const cardest::Constraint& c) const noexcept { return std::hash<std::string>{}(c.key()); }
};
