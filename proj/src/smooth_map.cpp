#include "diffspace/smooth_map.hpp"

#include <algorithm>

#include "diffspace/error.hpp"

namespace diffspace {

SmoothMap::SmoothMap(int input_dim, std::vector<NodePtr> components)
    : input_dim_(input_dim), components_(std::move(components)) {
  if (input_dim_ < 0) throw DimensionError("negative input dimension");
  if (components_.empty()) throw DimensionError("a smooth map needs at least one output");
  for (const auto& c : components_) {
    if (!c) throw DimensionError("null expression in smooth map");
    if (arity(c) > input_dim_)
      throw DimensionError("expression '" + diffspace::to_string(c) + "' reads x" +
                           std::to_string(arity(c)) + " but the map has " +
                           std::to_string(input_dim_) + " inputs");
  }
}

void SmoothMap::check_input(std::size_t n) const {
  if (static_cast<int>(n) != input_dim_)
    throw DimensionError("point of dimension " + std::to_string(n) + " given to a map on R^" +
                         std::to_string(input_dim_));
}

SmoothMap SmoothMap::component(int i) const {
  if (i < 0 || i >= output_dim()) throw DimensionError("component index out of range");
  return SmoothMap(input_dim_, {components_[static_cast<std::size_t>(i)]});
}

Point SmoothMap::evaluate(std::span<const double> x) const { return evaluate_as<double>(x); }

double SmoothMap::evaluate_scalar(std::span<const double> x) const {
  if (output_dim() != 1) throw DimensionError("evaluate_scalar on a vector-valued map");
  check_input(x.size());
  return eval<double>(components_[0], x);
}

Jet SmoothMap::jet(std::span<const double> x) const {
  check_input(x.size());
  const int m = output_dim();
  Jet j;
  j.value.resize(m);
  j.jacobian.resize(m, input_dim_);
  for (int r = 0; r < m; ++r) j.value[r] = eval<double>(components_[static_cast<std::size_t>(r)], x);
  std::vector<Dual<double>> seeded(x.size());
  for (int c = 0; c < input_dim_; ++c) {
    for (std::size_t i = 0; i < x.size(); ++i)
      seeded[i] = Dual<double>(x[i], static_cast<int>(i) == c ? 1.0 : 0.0);
    for (int r = 0; r < m; ++r)
      j.jacobian(r, c) =
          eval<Dual<double>>(components_[static_cast<std::size_t>(r)], std::span<const Dual<double>>(seeded)).d;
  }
  return j;
}

Eigen::MatrixXd SmoothMap::derivatives_along(std::span<const double> x, const Eigen::MatrixXd& directions) const {
  check_input(x.size());
  if (directions.rows() != input_dim_) throw DimensionError("direction matrix does not match the input dimension");
  const int m = output_dim();
  Eigen::MatrixXd out(m, directions.cols());
  std::vector<Dual<double>> seeded(x.size());
  for (Eigen::Index c = 0; c < directions.cols(); ++c) {
    for (std::size_t i = 0; i < x.size(); ++i) seeded[i] = Dual<double>(x[i], directions(static_cast<Eigen::Index>(i), c));
    for (int r = 0; r < m; ++r)
      out(r, c) =
          eval<Dual<double>>(components_[static_cast<std::size_t>(r)], std::span<const Dual<double>>(seeded)).d;
  }
  return out;
}

Eigen::VectorXd SmoothMap::gradient(std::span<const double> x) const {
  if (output_dim() != 1) throw DimensionError("gradient of a vector-valued map");
  return jet(x).jacobian.row(0).transpose();
}

bool SmoothMap::depends_on(int var) const {
  return std::any_of(components_.begin(), components_.end(),
                     [var](const NodePtr& c) { return diffspace::depends_on(c, var); });
}

std::string SmoothMap::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) s += ", ";
    s += diffspace::to_string(components_[i]);
  }
  return s + ")";
}

SmoothMap SmoothMap::identity(int n) {
  std::vector<NodePtr> c;
  for (int i = 0; i < n; ++i) c.push_back(make_variable(i));
  return SmoothMap(n, std::move(c));
}

SmoothMap SmoothMap::coordinate(int n, int i) {
  if (i < 0 || i >= n) throw DimensionError("coordinate index out of range");
  return SmoothMap(n, {make_variable(i)});
}

SmoothMap SmoothMap::constant(int n, std::vector<double> values) {
  std::vector<NodePtr> c;
  for (double v : values) c.push_back(make_constant(v));
  return SmoothMap(n, std::move(c));
}

SmoothMap SmoothMap::constant_scalar(int n, double value) { return constant(n, {value}); }

SmoothMap SmoothMap::projection(int n, std::vector<int> indices) {
  std::vector<NodePtr> c;
  for (int i : indices) {
    if (i < 0 || i >= n) throw DimensionError("projection index out of range");
    c.push_back(make_variable(i));
  }
  return SmoothMap(n, std::move(c));
}

SmoothMap SmoothMap::linear(const std::vector<std::vector<Fraction>>& matrix) {
  if (matrix.empty()) throw DimensionError("empty matrix");
  const int cols = static_cast<int>(matrix[0].size());
  std::vector<NodePtr> out;
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != cols) throw DimensionError("ragged matrix");
    NodePtr acc;
    for (int c = 0; c < cols; ++c) {
      const Fraction& f = row[static_cast<std::size_t>(c)];
      if (f.num == 0) continue;
      NodePtr term = make_variable(c);
      if (!(f.num == 1 && f.den == 1))
        term = make_binary(BinaryOp::kMul, make_rational_constant(f.num, f.den), term);
      acc = acc ? make_binary(BinaryOp::kAdd, acc, term) : term;
    }
    out.push_back(acc ? acc : make_constant(0.0));
  }
  return SmoothMap(cols, std::move(out));
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
  if (inner.output_dim() != outer.input_dim())
    throw DimensionError("cannot compose: inner map has " + std::to_string(inner.output_dim()) +
                         " outputs, outer map has " + std::to_string(outer.input_dim()) + " inputs");
  std::vector<NodePtr> out;
  out.reserve(static_cast<std::size_t>(outer.output_dim()));
  for (const auto& c : outer.components()) out.push_back(make_compose(c, inner.components()));
  return SmoothMap(inner.input_dim(), std::move(out));
}

SmoothMap stack(const std::vector<SmoothMap>& maps) {
  if (maps.empty()) throw DimensionError("stack of no maps");
  const int n = maps.front().input_dim();
  std::vector<NodePtr> out;
  for (const auto& m : maps) {
    if (m.input_dim() != n) throw DimensionError("stack of maps with different input dimensions");
    out.insert(out.end(), m.components().begin(), m.components().end());
  }
  return SmoothMap(n, std::move(out));
}

SmoothMap lift_over_interval(const SmoothMap& f) {
  const int n = f.input_dim();
  if (n == 0) return SmoothMap(1, f.components());
  std::vector<int> idx;
  for (int i = 1; i <= n; ++i) idx.push_back(i);
  return compose(f, SmoothMap::projection(n + 1, idx));
}

SmoothMap fix_first_input(const SmoothMap& f, double value) {
  const int n = f.input_dim() - 1;
  if (n < 0) throw DimensionError("fix_first_input on a map without inputs");
  std::vector<NodePtr> args{make_constant(value)};
  for (int i = 0; i < n; ++i) args.push_back(make_variable(i));
  return compose(f, SmoothMap(n, std::move(args)));
}

SmoothMap partial_derivative(const SmoothMap& scalar, int var) {
  if (scalar.output_dim() != 1) throw DimensionError("partial derivative of a vector-valued map");
  if (var < 0 || var >= scalar.input_dim()) throw DimensionError("partial derivative index out of range");
  if (!scalar.depends_on(var)) return SmoothMap::constant_scalar(scalar.input_dim(), 0.0);
  return SmoothMap(scalar.input_dim(), {make_jacobian_det({scalar.component_node(0)}, {var})});
}

namespace {

SmoothMap binary(BinaryOp op, const SmoothMap& a, const SmoothMap& b) {
  if (a.output_dim() != 1 || b.output_dim() != 1)
    throw DimensionError("scalar arithmetic on vector-valued maps");
  const int n = std::max(a.input_dim(), b.input_dim());
  if (a.input_dim() != b.input_dim())
    throw DimensionError("arithmetic on maps with different input dimensions");
  return SmoothMap(n, {make_binary(op, a.component_node(0), b.component_node(0))});
}

SmoothMap unary(UnaryOp op, const SmoothMap& a) {
  if (a.output_dim() != 1) throw DimensionError("scalar primitive on a vector-valued map");
  return SmoothMap(a.input_dim(), {make_unary(op, a.component_node(0))});
}

}  // namespace

SmoothMap operator+(const SmoothMap& a, const SmoothMap& b) { return binary(BinaryOp::kAdd, a, b); }
SmoothMap operator-(const SmoothMap& a, const SmoothMap& b) { return binary(BinaryOp::kSub, a, b); }
SmoothMap operator*(const SmoothMap& a, const SmoothMap& b) { return binary(BinaryOp::kMul, a, b); }
SmoothMap operator/(const SmoothMap& a, const SmoothMap& b) { return binary(BinaryOp::kDiv, a, b); }
SmoothMap operator-(const SmoothMap& a) { return unary(UnaryOp::kNeg, a); }
SmoothMap operator*(double c, const SmoothMap& a) {
  return SmoothMap::constant_scalar(a.input_dim(), c) * a;
}
SmoothMap pow(const SmoothMap& a, int exponent) {
  if (a.output_dim() != 1) throw DimensionError("power of a vector-valued map");
  return SmoothMap(a.input_dim(), {make_int_power(a.component_node(0), exponent)});
}
SmoothMap exp(const SmoothMap& a) { return unary(UnaryOp::kExp, a); }
SmoothMap sin(const SmoothMap& a) { return unary(UnaryOp::kSin, a); }
SmoothMap cos(const SmoothMap& a) { return unary(UnaryOp::kCos, a); }
SmoothMap bump(const SmoothMap& a) { return unary(UnaryOp::kBump, a); }

}  // namespace diffspace
