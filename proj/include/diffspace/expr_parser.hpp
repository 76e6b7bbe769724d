#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "diffspace/smooth_map.hpp"

namespace diffspace {

/// Parses infix expressions over coordinates x1..xn:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | x<k> | name | func '(' expr ')' | '(' expr ')'
///   func    := exp | log | sin | cos | sqrt | bump
///
/// `bump(u)` is e^{-u^{-2}} extended by 0 at u = 0.  Decimal literals become
/// exact rationals; an integer exponent becomes an integer power.  Errors are
/// ParseError with 1-based line/column inside `text`.
///
/// `aliases` optionally names extra identifiers for x1.., e.g. {"t", "x"} makes
/// `t` read x1 and `x` read x2.
NodePtr parse_expression(std::string_view text, int input_dim,
                         const std::vector<std::string>& aliases = {});

/// One scalar map per expression, all over the same input dimension.
SmoothMap parse_map(const std::vector<std::string>& expressions, int input_dim,
                    const std::vector<std::string>& aliases = {});

}  // namespace diffspace
