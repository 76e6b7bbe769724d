#include "diffspace/expr_parser.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int input_dim, const std::vector<std::string>& aliases)
      : text_(text), input_dim_(input_dim), aliases_(aliases) {}

  NodePtr parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    NodePtr e = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
    return e;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (at_end()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column_); }

  bool accept(char c) {
    skip_space();
    if (peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = make_binary(BinaryOp::kAdd, lhs, term());
      } else if (accept('-')) {
        lhs = make_binary(BinaryOp::kSub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = make_binary(BinaryOp::kMul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_binary(BinaryOp::kDiv, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      NodePtr arg = unary();
      if (const auto* c = std::get_if<Constant>(&arg->kind)) {
        if (c->exact) return make_rational_constant(-c->exact->num, c->exact->den);
        return make_constant(-c->value);
      }
      return make_unary(UnaryOp::kNeg, arg);
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) {
      NodePtr exponent = unary();
      if (const auto* c = std::get_if<Constant>(&exponent->kind)) {
        if (c->exact && c->exact->den == 1 && std::abs(c->exact->num) <= 64)
          return make_int_power(base, static_cast<int>(c->exact->num));
      }
      return make_binary(BinaryOp::kPow, base, exponent);
    }
    return base;
  }

  NodePtr number() {
    std::int64_t mantissa = 0;
    int scale = 0;  // value = mantissa · 10^scale
    bool exact = true;
    double approx = 0.0;
    bool any_digit = false;
    const std::size_t start = pos_;
    auto take_digit = [&](bool fractional) {
      int d = peek() - '0';
      any_digit = true;
      if (mantissa > (std::numeric_limits<std::int64_t>::max() - d) / 10) {
        exact = false;
      } else {
        mantissa = mantissa * 10 + d;
        if (fractional) --scale;
      }
      advance();
    };
    while (std::isdigit(static_cast<unsigned char>(peek()))) take_digit(false);
    if (peek() == '.') {
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) take_digit(true);
    }
    if (!any_digit) fail("malformed number");
    if (peek() == 'e' || peek() == 'E') {
      advance();
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        if (peek() == '-') sign = -1;
        advance();
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      int e = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        e = e * 10 + (peek() - '0');
        if (e > 400) fail("exponent out of range");
        advance();
      }
      scale += sign * e;
    }
    approx = std::stod(std::string(text_.substr(start, pos_ - start)));
    if (exact) {
      std::int64_t num = mantissa;
      std::int64_t den = 1;
      for (int s = scale; s > 0; --s) {
        if (num > std::numeric_limits<std::int64_t>::max() / 10) { exact = false; break; }
        num *= 10;
      }
      for (int s = scale; s < 0; ++s) {
        if (den > std::numeric_limits<std::int64_t>::max() / 10) { exact = false; break; }
        den *= 10;
      }
      if (exact) {
        std::int64_t a = num, b = den;
        while (b != 0) { std::int64_t t = a % b; a = b; b = t; }
        if (a > 1) num /= a, den /= a;
        return make_rational_constant(num, den);
      }
    }
    return make_constant(approx);
  }

  NodePtr primary() {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      advance();
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const int id_line = line_;
      const int id_col = column_;
      std::string id;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        id += peek();
        advance();
      }
      return identifier(id, id_line, id_col);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr identifier(const std::string& id, int id_line, int id_col) {
    static const std::pair<const char*, UnaryOp> kFunctions[] = {
        {"exp", UnaryOp::kExp},   {"log", UnaryOp::kLog},   {"sin", UnaryOp::kSin},
        {"cos", UnaryOp::kCos},   {"sqrt", UnaryOp::kSqrt}, {"bump", UnaryOp::kBump}};
    for (const auto& [name, op] : kFunctions) {
      if (id == name) {
        if (!accept('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make_unary(op, arg);
      }
    }
    if (id == "pi") return make_constant(std::numbers::pi);
    for (std::size_t i = 0; i < aliases_.size(); ++i) {
      if (id == aliases_[i]) {
        if (static_cast<int>(i) >= input_dim_)
          throw ParseError("variable '" + id + "' exceeds input dimension " + std::to_string(input_dim_),
                           id_line, id_col);
        return make_variable(static_cast<int>(i));
      }
    }
    if (id.size() > 1 && id[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < id.size(); ++i) digits = digits && std::isdigit(static_cast<unsigned char>(id[i]));
      if (digits) {
        int k = std::stoi(id.substr(1));
        if (k < 1 || k > input_dim_)
          throw ParseError("coordinate '" + id + "' outside x1..x" + std::to_string(input_dim_), id_line,
                           id_col);
        return make_variable(k - 1);
      }
    }
    throw ParseError("unknown identifier '" + id + "'", id_line, id_col);
  }

  std::string_view text_;
  int input_dim_;
  const std::vector<std::string>& aliases_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

NodePtr parse_expression(std::string_view text, int input_dim, const std::vector<std::string>& aliases) {
  return Parser(text, input_dim, aliases).parse();
}

SmoothMap parse_map(const std::vector<std::string>& expressions, int input_dim,
                    const std::vector<std::string>& aliases) {
  std::vector<NodePtr> nodes;
  nodes.reserve(expressions.size());
  for (const auto& e : expressions) nodes.push_back(parse_expression(e, input_dim, aliases));
  return SmoothMap(input_dim, std::move(nodes));
}

}  // namespace diffspace
