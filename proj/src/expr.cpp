#include "diffspace/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "diffspace/quadrature.hpp"

namespace diffspace {

namespace {

NodePtr wrap(Node n) { return std::make_shared<const Node>(std::move(n)); }

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

NodePtr make_constant(double value) {
  Constant c{value, std::nullopt};
  // Integers carry an exact fraction for rational evaluation.
  if (std::isfinite(value) && std::nearbyint(value) == value && std::abs(value) < 9e15)
    c.exact = Fraction{static_cast<std::int64_t>(value), 1};
  return wrap(Node{c});
}

NodePtr make_rational_constant(std::int64_t num, std::int64_t den) {
  if (den == 0) throw EvalError("rational constant with zero denominator");
  if (den < 0) num = -num, den = -den;
  return wrap(Node{Constant{static_cast<double>(num) / static_cast<double>(den), Fraction{num, den}}});
}

NodePtr make_variable(int index) {
  if (index < 0) throw DimensionError("negative variable index");
  return wrap(Node{Variable{index}});
}

NodePtr make_unary(UnaryOp op, NodePtr arg) { return wrap(Node{Unary{op, std::move(arg)}}); }

NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  return wrap(Node{Binary{op, std::move(lhs), std::move(rhs)}});
}

NodePtr make_int_power(NodePtr base, int exponent) {
  return wrap(Node{IntPower{std::move(base), exponent}});
}

NodePtr make_compose(NodePtr outer, std::vector<NodePtr> args) {
  // Composition with a bare variable or constant collapses structurally.
  if (auto v = variable_index(outer)) {
    if (static_cast<std::size_t>(*v) >= args.size())
      throw DimensionError("composition reads variable x" + std::to_string(*v + 1) + " of only " +
                           std::to_string(args.size()) + " arguments");
    return args[static_cast<std::size_t>(*v)];
  }
  if (std::holds_alternative<Constant>(outer->kind)) return outer;
  if (arity(outer) > static_cast<int>(args.size()))
    throw DimensionError("composition arity mismatch: outer reads " + std::to_string(arity(outer)) +
                         " variables, " + std::to_string(args.size()) + " supplied");
  return wrap(Node{Compose{std::move(outer), std::move(args)}});
}

NodePtr make_fiber_integral(NodePtr integrand, int order) {
  GaussLegendre rule = gauss_legendre_on(order, 0.0, 1.0);
  return wrap(Node{FiberIntegral{std::move(integrand),
                                 std::make_shared<const std::vector<double>>(std::move(rule.nodes)),
                                 std::make_shared<const std::vector<double>>(std::move(rule.weights))}});
}

NodePtr make_jacobian_det(std::vector<NodePtr> rows, std::vector<int> columns) {
  if (rows.size() != columns.size())
    throw DimensionError("jacobian determinant needs as many columns as rows");
  return wrap(Node{JacobianDet{std::move(rows), std::move(columns)}});
}

std::optional<double> constant_value(const NodePtr& node) {
  if (const auto* c = std::get_if<Constant>(&node->kind)) return c->value;
  return std::nullopt;
}

std::optional<int> variable_index(const NodePtr& node) {
  if (const auto* v = std::get_if<Variable>(&node->kind)) return v->index;
  return std::nullopt;
}

bool depends_on(const NodePtr& node, int var) {
  const Node& n = *node;
  if (std::holds_alternative<Constant>(n.kind)) return false;
  if (const auto* v = std::get_if<Variable>(&n.kind)) return v->index == var;
  if (const auto* u = std::get_if<Unary>(&n.kind)) return depends_on(u->arg, var);
  if (const auto* b = std::get_if<Binary>(&n.kind))
    return depends_on(b->lhs, var) || depends_on(b->rhs, var);
  if (const auto* p = std::get_if<IntPower>(&n.kind)) return depends_on(p->base, var);
  if (const auto* c = std::get_if<Compose>(&n.kind)) {
    for (std::size_t i = 0; i < c->args.size(); ++i)
      if (depends_on(c->outer, static_cast<int>(i)) && depends_on(c->args[i], var)) return true;
    return false;
  }
  if (const auto* f = std::get_if<FiberIntegral>(&n.kind)) return depends_on(f->integrand, var + 1);
  const auto& j = std::get<JacobianDet>(n.kind);
  return std::any_of(j.rows.begin(), j.rows.end(),
                     [var](const NodePtr& r) { return depends_on(r, var); });
}

int arity(const NodePtr& node) {
  const Node& n = *node;
  if (std::holds_alternative<Constant>(n.kind)) return 0;
  if (const auto* v = std::get_if<Variable>(&n.kind)) return v->index + 1;
  if (const auto* u = std::get_if<Unary>(&n.kind)) return arity(u->arg);
  if (const auto* b = std::get_if<Binary>(&n.kind)) return std::max(arity(b->lhs), arity(b->rhs));
  if (const auto* p = std::get_if<IntPower>(&n.kind)) return arity(p->base);
  if (const auto* c = std::get_if<Compose>(&n.kind)) {
    int a = 0;
    for (const auto& arg : c->args) a = std::max(a, arity(arg));
    return a;
  }
  if (const auto* f = std::get_if<FiberIntegral>(&n.kind)) return std::max(0, arity(f->integrand) - 1);
  const auto& j = std::get<JacobianDet>(n.kind);
  int a = 0;
  for (const auto& r : j.rows) a = std::max(a, arity(r));
  for (int c : j.columns) a = std::max(a, c + 1);
  return a;
}

std::string to_string(const NodePtr& node) {
  const Node& n = *node;
  if (const auto* c = std::get_if<Constant>(&n.kind)) {
    if (c->exact && c->exact->den != 1)
      return "(" + std::to_string(c->exact->num) + "/" + std::to_string(c->exact->den) + ")";
    return format_double(c->value);
  }
  if (const auto* v = std::get_if<Variable>(&n.kind)) return "x" + std::to_string(v->index + 1);
  if (const auto* u = std::get_if<Unary>(&n.kind)) {
    const std::string a = to_string(u->arg);
    switch (u->op) {
      case UnaryOp::kNeg: return "(-" + a + ")";
      case UnaryOp::kExp: return "exp(" + a + ")";
      case UnaryOp::kLog: return "log(" + a + ")";
      case UnaryOp::kSin: return "sin(" + a + ")";
      case UnaryOp::kCos: return "cos(" + a + ")";
      case UnaryOp::kSqrt: return "sqrt(" + a + ")";
      case UnaryOp::kBump: return "bump(" + a + ")";
    }
  }
  if (const auto* b = std::get_if<Binary>(&n.kind)) {
    const char* op = "?";
    switch (b->op) {
      case BinaryOp::kAdd: op = " + "; break;
      case BinaryOp::kSub: op = " - "; break;
      case BinaryOp::kMul: op = "*"; break;
      case BinaryOp::kDiv: op = "/"; break;
      case BinaryOp::kPow: op = "^"; break;
    }
    return "(" + to_string(b->lhs) + op + to_string(b->rhs) + ")";
  }
  if (const auto* p = std::get_if<IntPower>(&n.kind))
    return to_string(p->base) + "^" + std::to_string(p->exponent);
  if (const auto* c = std::get_if<Compose>(&n.kind)) {
    std::string s = "[" + to_string(c->outer) + "](";
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (i) s += ", ";
      s += to_string(c->args[i]);
    }
    return s + ")";
  }
  if (const auto* f = std::get_if<FiberIntegral>(&n.kind))
    return "int_0^1[" + to_string(f->integrand) + "]";
  const auto& j = std::get<JacobianDet>(n.kind);
  std::string s = "det d(";
  for (std::size_t i = 0; i < j.rows.size(); ++i) {
    if (i) s += ", ";
    s += to_string(j.rows[i]);
  }
  s += ")/d(";
  for (std::size_t i = 0; i < j.columns.size(); ++i) {
    if (i) s += ", ";
    s += "x" + std::to_string(j.columns[i] + 1);
  }
  return s + ")";
}

namespace detail {

void throw_domain(const std::string& what, const NodePtr& node) {
  throw EvalError(what + " in node '" + to_string(node) + "'");
}

}  // namespace detail

}  // namespace diffspace
