#pragma once

#include <json.hpp>

#include "cardest/errors.hpp"
#include "cardest/value.hpp"

namespace cardest::detail {

using json = nlohmann::json;

inline json scalar_to_json(const Scalar& v) {
    return std::visit([](const auto& x) { return json(x); }, v);
}

inline Scalar scalar_from_json(const json& j, std::size_t line = 0) {
    switch (j.type()) {
        case json::value_t::boolean: return j.get<bool>();
        case json::value_t::number_integer: return j.get<std::int64_t>();
        case json::value_t::number_unsigned: return static_cast<std::int64_t>(j.get<std::uint64_t>());
        case json::value_t::number_float: return j.get<double>();
        case json::value_t::string: return j.get<std::string>();
        default: throw ParseError("expected a scalar value, got " + j.dump(), line);
    }
}

inline json operand_to_json(const Operand& v) {
    if (auto* s = std::get_if<Scalar>(&v)) return scalar_to_json(*s);
    json arr = json::array();
    for (const auto& x : std::get<std::vector<Scalar>>(v)) arr.push_back(scalar_to_json(x));
    return arr;
}

inline Operand operand_from_json(const json& j, std::size_t line = 0) {
    if (!j.is_array()) return scalar_from_json(j, line);
    std::vector<Scalar> out;
    for (const auto& x : j) out.push_back(scalar_from_json(x, line));
    return out;
}

}  // namespace cardest::detail
