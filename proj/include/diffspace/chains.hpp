#pragma once

#include <string>
#include <utility>
#include <vector>

#include "diffspace/diff_space.hpp"

namespace diffspace {

/// Axis-parallel box J^p = Π [lo_i, hi_i]; p = 0 is the point ℝ⁰.
struct Box {
  std::vector<std::pair<double, double>> bounds;

  Box() = default;
  explicit Box(std::vector<std::pair<double, double>> b);

  static Box unit(int p);

  int dim() const noexcept { return static_cast<int>(bounds.size()); }
  bool operator==(const Box&) const = default;
  /// Box with axis i (0-based) removed.
  Box drop_axis(int i) const;
};

/// A singular p-cube σ = f|_{J^p} into a space.
struct SingularCube {
  Box box;
  SmoothMap representative;  // ℝ^p → ℝⁿ
  SpacePtr space;

  int dim() const noexcept { return box.dim(); }
  Point operator()(std::span<const double> t) const { return representative.evaluate(t); }
};

/// Validating constructor: dimensions must agree and grid points of the box
/// must land in the space.
SingularCube make_cube(Box box, SmoothMap representative, SpacePtr space);

/// The identity cube of ℝ^p on the unit box.
SingularCube identity_cube(const SpacePtr& euclidean, int p);

/// Deterministic grid used to compare cubes: each axis sampled at fixed
/// fractions of its interval.
std::vector<Point> comparison_grid(const Box& box);

/// Pointwise equality on the comparison grid.
bool same_cube(const SingularCube& a, const SingularCube& b, double tolerance = 1e-12);

/// Formal ℤ-combination of singular cubes kept in canonical order with equal
/// cubes merged and zero terms removed.
class CubicalChain {
 public:
  struct Term {
    long coefficient;
    SingularCube cube;
  };

  CubicalChain() = default;
  explicit CubicalChain(const SingularCube& cube, long coefficient = 1);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  void add(long coefficient, const SingularCube& cube);
  CubicalChain& operator+=(const CubicalChain& other);
  CubicalChain& operator-=(const CubicalChain& other);
  friend CubicalChain operator+(CubicalChain a, const CubicalChain& b) { return a += b; }
  friend CubicalChain operator-(CubicalChain a, const CubicalChain& b) { return a -= b; }
  friend CubicalChain operator*(long k, const CubicalChain& c);

  std::string describe() const;

 private:
  void insert(long coefficient, const SingularCube& cube, std::vector<double> signature);
  void sort();

  std::vector<Term> terms_;
  std::vector<std::vector<double>> signatures_;
};

/// σ∘φ_i^± with 1 ≤ axis ≤ p.
SingularCube face(const SingularCube& sigma, int axis, bool upper);

/// ∂σ = Σ_{i=1}^{p} (−1)^{i+1} [σ∘φ_i^+ − σ∘φ_i^−], extended linearly.
CubicalChain boundary(const CubicalChain& chain);
CubicalChain boundary(const SingularCube& sigma);

/// K(σ)(t, s) = (t, σ(s)) into I × S.
SingularCube prism(const SingularCube& sigma);
CubicalChain prism(const CubicalChain& chain);

/// (u_i)_*σ: s ↦ (i, σ(s)) into I × S.
SingularCube endpoint_inclusion(int i, const SingularCube& sigma);
CubicalChain endpoint_inclusion(int i, const CubicalChain& chain);

struct HomotopyCheck {
  bool holds = false;
  CubicalChain lhs;  // K∂σ + ∂Kσ (∂Kσ alone for p = 0)
  CubicalChain rhs;  // (u₁)_*σ − (u₀)_*σ
};

/// Chain-level homotopy identity K∂ + ∂K = (u₁)_* − (u₀)_* for one cube.
HomotopyCheck chain_homotopy_check(const SingularCube& sigma);

}  // namespace diffspace
