#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffspace/expr.hpp"

namespace diffspace {

using Point = std::vector<double>;

/// Value and first derivatives of a map at a point.
struct Jet {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;  // output_dim × input_dim
};

/// A differentiable map ℝⁿ → ℝᵐ given by one expression tree per output.
///
/// Values are immutable; copies share their trees.  input_dim may be 0 for the
/// constant maps that represent singular 0-cubes.
class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(int input_dim, std::vector<NodePtr> components);

  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<NodePtr>& components() const noexcept { return components_; }
  const NodePtr& component_node(int i) const { return components_.at(static_cast<std::size_t>(i)); }

  /// Scalar map formed by output i.
  SmoothMap component(int i) const;

  Point evaluate(std::span<const double> x) const;
  double evaluate_scalar(std::span<const double> x) const;

  template <typename T>
  std::vector<T> evaluate_as(std::span<const T> x) const {
    check_input(x.size());
    std::vector<T> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(eval<T>(c, x));
    return out;
  }

  /// Value and exact Jacobian by forward-mode dual propagation.
  Jet jet(std::span<const double> x) const;

  /// Derivatives along the columns of `directions` (input_dim × k), one
  /// forward pass per column: output_dim × k.
  Eigen::MatrixXd derivatives_along(std::span<const double> x, const Eigen::MatrixXd& directions) const;

  /// Gradient of a scalar map.
  Eigen::VectorXd gradient(std::span<const double> x) const;

  bool depends_on(int var) const;

  std::string to_string() const;

  // ---- common maps ----
  static SmoothMap identity(int n);
  static SmoothMap coordinate(int n, int i);
  static SmoothMap constant(int n, std::vector<double> values);
  static SmoothMap constant_scalar(int n, double value);
  /// x ↦ (x_{indices[0]}, x_{indices[1]}, ...)
  static SmoothMap projection(int n, std::vector<int> indices);
  /// x ↦ A·x for a rational matrix given as (num, den) entries, rows × cols.
  static SmoothMap linear(const std::vector<std::vector<Fraction>>& matrix);

 private:
  void check_input(std::size_t n) const;

  int input_dim_ = 0;
  std::vector<NodePtr> components_;
};

/// outer ∘ inner.  Requires inner.output_dim == outer.input_dim.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

/// Concatenate outputs of maps with equal input dimension.
SmoothMap stack(const std::vector<SmoothMap>& maps);

/// Re-read a map over n+1 inputs whose first input is ignored:
/// (t, x) ↦ f(x).
SmoothMap lift_over_interval(const SmoothMap& f);

/// Substitute t = value in a map over (t, x): x ↦ f(value, x).
SmoothMap fix_first_input(const SmoothMap& f, double value);

/// d f / d x_var as a scalar map (evaluated by nested forward mode).
SmoothMap partial_derivative(const SmoothMap& scalar, int var);

// Arithmetic on scalar maps of equal input dimension.
SmoothMap operator+(const SmoothMap& a, const SmoothMap& b);
SmoothMap operator-(const SmoothMap& a, const SmoothMap& b);
SmoothMap operator*(const SmoothMap& a, const SmoothMap& b);
SmoothMap operator/(const SmoothMap& a, const SmoothMap& b);
SmoothMap operator-(const SmoothMap& a);
SmoothMap operator*(double c, const SmoothMap& a);
SmoothMap pow(const SmoothMap& a, int exponent);
SmoothMap exp(const SmoothMap& a);
SmoothMap sin(const SmoothMap& a);
SmoothMap cos(const SmoothMap& a);
SmoothMap bump(const SmoothMap& a);

}  // namespace diffspace
