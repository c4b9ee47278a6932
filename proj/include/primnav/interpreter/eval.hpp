#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "primnav/interpreter/value.hpp"

namespace primnav::interp {

struct EvalError : ValidationError {
  using ValidationError::ValidationError;
};

// Resolves an identifier to a bound value, or nullopt when unbound.
using Lookup = std::function<std::optional<Value>(std::string_view)>;

// Restricted expression language:
//   expr   := or
//   or     := and ('or' and)*
//   and    := not ('and' not)*
//   not    := 'not' not | cmp
//   cmp    := sum (('<' | '<=' | '>' | '>=' | '==' | '!=') sum)?
//   sum    := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | atom
//   atom   := number | 'True' | 'False' | quoted text | identifier | '(' expr ')'
// Identifiers bound to detections evaluate to their count, nav outcomes to whether the
// goal was reached, answers to their text. No side effects. Throws EvalError.
Value evaluate_expression(std::string_view expr, const Lookup& lookup);

}  // namespace primnav::interp
