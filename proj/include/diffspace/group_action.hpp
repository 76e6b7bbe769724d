#pragma once

#include <span>
#include <vector>

#include "diffspace/scalar.hpp"
#include "diffspace/smooth_map.hpp"

namespace diffspace {

/// Square matrix with exact rational entries, row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int dim, std::vector<Rational> entries);

  static RationalMatrix identity(int dim);

  int dim() const noexcept { return dim_; }
  const Rational& operator()(int r, int c) const { return entries_[static_cast<std::size_t>(r * dim_ + c)]; }

  RationalMatrix operator*(const RationalMatrix& other) const;
  bool operator==(const RationalMatrix& other) const { return dim_ == other.dim_ && entries_ == other.entries_; }

  Rational determinant() const;

  Point apply(std::span<const double> x) const;
  std::vector<Rational> apply(std::span<const Rational> x) const;

  /// x ↦ M·x as a SmoothMap (entries must fit 64-bit fractions).
  SmoothMap as_map() const;

 private:
  int dim_ = 0;
  std::vector<Rational> entries_;
};

/// A finite group acting linearly on ℝⁿ.  Identity membership, closure under
/// products and invertibility are verified exactly at construction.
class FiniteGroupAction {
 public:
  explicit FiniteGroupAction(std::vector<RationalMatrix> elements);

  /// Closure of the generators under multiplication.
  static FiniteGroupAction generated_by(std::vector<RationalMatrix> generators, std::size_t max_order = 1024);

  int ambient_dim() const noexcept { return dim_; }
  std::size_t order() const noexcept { return elements_.size(); }
  const std::vector<RationalMatrix>& elements() const noexcept { return elements_; }

 private:
  int dim_ = 0;
  std::vector<RationalMatrix> elements_;
};

/// Invariant polynomials embedding ℝⁿ/G in ℝᵏ, with the relations and
/// inequalities cutting out the image.
struct HilbertMap {
  SmoothMap components;                  // ℝⁿ → ℝᵏ
  std::vector<SmoothMap> relations;      // ℝᵏ → ℝ, vanish on the image
  std::vector<SmoothMap> inequalities;   // ℝᵏ → ℝ, nonnegative on the image
};

}  // namespace diffspace
