#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cardest {

using Scalar = std::variant<bool, std::int64_t, double, std::string>;

enum class Predicate { EQ, NEQ, LT, LEQ, GT, GEQ, IN, CONTAINS };

// IN takes a list, every other predicate a single scalar.
using Operand = std::variant<Scalar, std::vector<Scalar>>;

std::string_view predicate_symbol(Predicate p);
Predicate parse_predicate(std::string_view symbol);

bool is_numeric(const Scalar& v);
double as_double(const Scalar& v);

// Cross-type comparisons are unsatisfied, never an error. int/float coerce to float.
bool eval_predicate(const Scalar& value, Predicate p, const Operand& operand);

std::string scalar_to_string(const Scalar& v);
std::string operand_to_string(const Operand& v);

}  // namespace cardest
