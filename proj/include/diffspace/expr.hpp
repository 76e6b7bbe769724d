#pragma once

// Immutable scalar expression trees over an input vector.  Subtrees are
// shared through NodePtr and never mutated after construction.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "diffspace/scalar.hpp"

namespace diffspace {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct Constant {
  double value = 0.0;
  std::optional<Fraction> exact;  // set when the literal is a rational number
};

struct Variable {
  int index = 0;
};

enum class UnaryOp { kNeg, kExp, kLog, kSin, kCos, kSqrt, kBump };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };

struct Unary {
  UnaryOp op;
  NodePtr arg;
};

struct Binary {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};

struct IntPower {
  NodePtr base;
  int exponent = 1;
};

/// outer(args[0](x), ..., args[k-1](x)); outer reads k variables.
struct Compose {
  NodePtr outer;
  std::vector<NodePtr> args;
};

/// Σ_k w_k · integrand(t_k, x): a fixed-node quadrature of the first input
/// of `integrand` over [0, 1].  The node itself reads one variable fewer.
struct FiberIntegral {
  NodePtr integrand;
  std::shared_ptr<const std::vector<double>> nodes;
  std::shared_ptr<const std::vector<double>> weights;
};

/// det[ ∂ rows[i] / ∂ x_{columns[j]} ], evaluated by nested forward-mode.
struct JacobianDet {
  std::vector<NodePtr> rows;
  std::vector<int> columns;
};

struct Node {
  std::variant<Constant, Variable, Unary, Binary, IntPower, Compose, FiberIntegral,
               JacobianDet>
      kind;
};

// ---- construction -----------------------------------------------------------

NodePtr make_constant(double value);
NodePtr make_rational_constant(std::int64_t num, std::int64_t den);
NodePtr make_variable(int index);
NodePtr make_unary(UnaryOp op, NodePtr arg);
NodePtr make_binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
NodePtr make_int_power(NodePtr base, int exponent);
NodePtr make_compose(NodePtr outer, std::vector<NodePtr> args);
NodePtr make_fiber_integral(NodePtr integrand, int order);
NodePtr make_jacobian_det(std::vector<NodePtr> rows, std::vector<int> columns);

/// Exact constant check (used by the few structural shortcuts in composition).
std::optional<double> constant_value(const NodePtr& node);
std::optional<int> variable_index(const NodePtr& node);

/// Conservative structural test: false guarantees independence of x_var.
bool depends_on(const NodePtr& node, int var);

/// Smallest input count the tree can be evaluated with.
int arity(const NodePtr& node);

std::string to_string(const NodePtr& node);

// ---- evaluation -------------------------------------------------------------

template <typename T>
T eval(const NodePtr& node, std::span<const T> x);

namespace detail {

template <typename T>
T det(std::vector<std::vector<T>> m) {
  const std::size_t k = m.size();
  if (k == 0) return from_double<T>(1.0);
  if (k == 1) return m[0][0];
  if (k == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  // Laplace expansion along the first row; k stays small (≤ 5) in practice.
  T acc = from_double<T>(0.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<T>> minor;
    minor.reserve(k - 1);
    for (std::size_t r = 1; r < k; ++r) {
      std::vector<T> row;
      row.reserve(k - 1);
      for (std::size_t cc = 0; cc < k; ++cc)
        if (cc != c) row.push_back(m[r][cc]);
      minor.push_back(std::move(row));
    }
    T term = m[0][c] * det(std::move(minor));
    acc = (c % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

[[noreturn]] void throw_domain(const std::string& what, const NodePtr& node);

template <typename T>
T eval_unary(const Unary& u, const NodePtr& self, std::span<const T> x) {
  T a = eval<T>(u.arg, x);
  switch (u.op) {
    case UnaryOp::kNeg:
      return -a;
    case UnaryOp::kExp:
      return s_exp(a);
    case UnaryOp::kLog:
      if (!(value_of(a) > 0.0)) throw_domain("log of non-positive value", self);
      return s_log(a);
    case UnaryOp::kSin:
      return s_sin(a);
    case UnaryOp::kCos:
      return s_cos(a);
    case UnaryOp::kSqrt:
      if constexpr (dual_depth_v<T> > 0) {
        if (!(value_of(a) > 0.0)) throw_domain("sqrt is not differentiable at non-positive value", self);
      } else {
        if (value_of(a) < 0.0) throw_domain("sqrt of negative value", self);
      }
      return s_sqrt(a);
    case UnaryOp::kBump:
      return s_bump(a);
  }
  throw_domain("unknown unary operator", self);
}

template <typename T>
T eval_binary(const Binary& b, const NodePtr& self, std::span<const T> x) {
  T l = eval<T>(b.lhs, x);
  T r = eval<T>(b.rhs, x);
  switch (b.op) {
    case BinaryOp::kAdd:
      return l + r;
    case BinaryOp::kSub:
      return l - r;
    case BinaryOp::kMul:
      return l * r;
    case BinaryOp::kDiv:
      if (is_exact_zero(r) || value_of(r) == 0.0) throw_domain("division by zero", self);
      return l / r;
    case BinaryOp::kPow: {
      if (!(value_of(l) > 0.0)) throw_domain("real power of non-positive base", self);
      T lg = s_log(l);
      T prod = r * lg;
      return s_exp(prod);
    }
  }
  throw_domain("unknown binary operator", self);
}

}  // namespace detail

template <typename T>
T eval(const NodePtr& node, std::span<const T> x) {
  const Node& n = *node;
  if (const auto* c = std::get_if<Constant>(&n.kind)) {
    if constexpr (is_rational_based<T>::value) {
      if (c->exact) return from_fraction<T>(c->exact->num, c->exact->den);
    }
    return from_double<T>(c->value);
  }
  if (const auto* v = std::get_if<Variable>(&n.kind)) {
    if (v->index < 0 || static_cast<std::size_t>(v->index) >= x.size())
      detail::throw_domain("variable index out of range", node);
    return x[static_cast<std::size_t>(v->index)];
  }
  if (const auto* u = std::get_if<Unary>(&n.kind)) return detail::eval_unary<T>(*u, node, x);
  if (const auto* b = std::get_if<Binary>(&n.kind)) return detail::eval_binary<T>(*b, node, x);
  if (const auto* p = std::get_if<IntPower>(&n.kind)) {
    T base = eval<T>(p->base, x);
    if (p->exponent < 0 && (is_exact_zero(base) || value_of(base) == 0.0))
      detail::throw_domain("negative power of zero", node);
    return int_power(base, p->exponent);
  }
  if (const auto* c = std::get_if<Compose>(&n.kind)) {
    boost::container::small_vector<T, 8> inner;
    for (const auto& a : c->args) inner.push_back(eval<T>(a, x));
    return eval<T>(c->outer, std::span<const T>(inner.data(), inner.size()));
  }
  if (const auto* f = std::get_if<FiberIntegral>(&n.kind)) {
    boost::container::small_vector<T, 8> point(x.size() + 1);
    for (std::size_t i = 0; i < x.size(); ++i) point[i + 1] = x[i];
    T acc = from_double<T>(0.0);
    const auto& nodes = *f->nodes;
    const auto& weights = *f->weights;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      point[0] = from_double<T>(nodes[k]);
      acc = acc + from_double<T>(weights[k]) * eval<T>(f->integrand, std::span<const T>(point.data(), point.size()));
    }
    return acc;
  }
  const auto& j = std::get<JacobianDet>(n.kind);
  if constexpr (dual_depth_v<T> >= kMaxDualDepth) {
    detail::throw_domain("derivative nesting deeper than supported", node);
  } else {
    using D = Dual<T>;
    const std::size_t k = j.rows.size();
    std::vector<std::vector<T>> m(k, std::vector<T>(k));
    boost::container::small_vector<D, 8> seeded(x.size());
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < x.size(); ++i)
        seeded[i] = D(x[i], from_double<T>(static_cast<int>(i) == j.columns[c] ? 1.0 : 0.0));
      for (std::size_t r = 0; r < k; ++r)
        m[r][c] = eval<D>(j.rows[r], std::span<const D>(seeded.data(), seeded.size())).d;
    }
    return detail::det(std::move(m));
  }
}

}  // namespace diffspace
