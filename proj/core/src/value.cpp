#include "cardest/value.hpp"

#include <array>
#include <cmath>
#include <compare>
#include <cstdio>
#include <optional>

#include "cardest/errors.hpp"

namespace cardest {

namespace {

constexpr std::array<std::string_view, 8> kSymbols = {"=", "!=", "<", "<=", ">", ">=", "IN", "CONTAINS"};

std::optional<std::partial_ordering> compare(const Scalar& a, const Scalar& b) {
    if (is_numeric(a) && is_numeric(b)) {
        if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
            return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
        return as_double(a) <=> as_double(b);
    }
    if (a.index() != b.index()) return std::nullopt;
    if (auto* s = std::get_if<std::string>(&a)) return *s <=> std::get<std::string>(b);
    return std::get<bool>(a) <=> std::get<bool>(b);
}

bool test(const Scalar& value, Predicate p, const Scalar& rhs) {
    if (p == Predicate::CONTAINS) {
        auto* hay = std::get_if<std::string>(&value);
        auto* needle = std::get_if<std::string>(&rhs);
        return hay && needle && hay->find(*needle) != std::string::npos;
    }
    auto c = compare(value, rhs);
    if (!c) return false;
    switch (p) {
        case Predicate::EQ: return *c == 0;
        case Predicate::NEQ: return *c != 0 && *c != std::partial_ordering::unordered;
        case Predicate::LT: return *c < 0;
        case Predicate::LEQ: return *c <= 0;
        case Predicate::GT: return *c > 0;
        case Predicate::GEQ: return *c >= 0;
        default: return false;
    }
}

}  // namespace

std::string_view predicate_symbol(Predicate p) { return kSymbols[static_cast<std::size_t>(p)]; }

Predicate parse_predicate(std::string_view symbol) {
    for (std::size_t i = 0; i < kSymbols.size(); ++i)
        if (kSymbols[i] == symbol) return static_cast<Predicate>(i);
    if (symbol == "==") return Predicate::EQ;
    if (symbol == "<>") return Predicate::NEQ;
    throw ParseError("unknown predicate '" + std::string(symbol) + "'");
}

bool is_numeric(const Scalar& v) {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Scalar& v) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto* d = std::get_if<double>(&v)) return *d;
    if (auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    return std::nan("");
}

bool eval_predicate(const Scalar& value, Predicate p, const Operand& operand) {
    if (p == Predicate::IN) {
        auto* list = std::get_if<std::vector<Scalar>>(&operand);
        if (!list) return test(value, Predicate::EQ, std::get<Scalar>(operand));
        for (const auto& v : *list)
            if (test(value, Predicate::EQ, v)) return true;
        return false;
    }
    auto* single = std::get_if<Scalar>(&operand);
    return single && test(value, p, *single);
}

std::string scalar_to_string(const Scalar& v) {
    if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&v)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        std::string out = buf;
        if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
        return out;
    }
    std::string out = "\"";
    for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string operand_to_string(const Operand& v) {
    if (auto* s = std::get_if<Scalar>(&v)) return scalar_to_string(*s);
    std::string out = "[";
    const auto& list = std::get<std::vector<Scalar>>(v);
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ",";
        out += scalar_to_string(list[i]);
    }
    return out + "]";
}

}  // namespace cardest
