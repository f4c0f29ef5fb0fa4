#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cardest/constraint.hpp"
#include "cardest/query.hpp"

namespace cardest {

enum class IpPattern { Id, EdgePattern };
enum class IpClass { PropValue, Prop, All };

struct EpestSpec {
    // Deterministic implied-closure copies, or an implication assumption.
    bool deterministic = false;
    IpPattern pattern = IpPattern::Id;
    IpClass cls = IpClass::All;
    std::string tag;
};

// Tags: impl, IP(id|ep, pv|p|a).
EpestSpec parse_epest_tag(std::string_view tag);
std::vector<EpestSpec> parse_epest_list(std::string_view text);

// Copies of PEs with src/trg/propValue constraints, widened to their implied closure.
PES epest_deterministic(const PES& pes, const QueryPattern& q);

// Per pattern instance, the union of all >= 2 PEs of the class inside it, with the minimum s.
PES epest_ip(const PES& pes, const QueryPattern& q, IpPattern pattern, IpClass cls);

PES apply_epests(const PES& pes, const QueryPattern& q, const std::vector<EpestSpec>& specs);

}  // namespace cardest
