#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diffspace/chains.hpp"
#include "diffspace/diff_space.hpp"
#include "diffspace/forms.hpp"
#include "diffspace/scalar.hpp"

namespace diffspace {

/// One open set of a cover, as a predicate on ambient points of S.
struct CoverRegion {
  std::string name;
  Membership membership;
};

/// A finite cover of S with a declared nerve.
///
/// `nonempty` lists the index tuples (strictly increasing, length ≥ 2) whose
/// intersections are declared contractible; every other intersection is
/// declared empty.  Single regions are always nonempty.
struct Cover {
  SpacePtr space;
  std::vector<CoverRegion> regions;
  std::vector<std::vector<int>> nonempty;
  /// Optional contraction witnesses h: I × ℝⁿ → ℝⁿ per tuple (singletons allowed).
  std::map<std::vector<int>, SmoothMap> contractions;
  double connectivity_scale = 0.1;  // ε of the sampling graph

  bool declared_nonempty(const std::vector<int>& tuple) const;
};

struct CoverValidation {
  std::size_t samples = 0;
  std::size_t uncovered = 0;  // sample points in no region
  std::map<std::vector<int>, std::size_t> hits;
};

/// Samples S and checks the declared nerve: no sample may lie in an
/// intersection declared empty, every declared intersection must be hit and
/// connected at the cover's connectivity scale, every sample must be covered, and every
/// contraction witness must stay inside its intersection with the right
/// endpoints.  ValidationError on the first inconsistency.
CoverValidation validate_cover(const Cover& cover, std::uint64_t seed, std::size_t count = 2000);

/// Dense matrix over ℚ.
struct RationalMatrixDense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> entries;  // row-major

  Rational& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

RationalMatrixDense multiply(const RationalMatrixDense& a, const RationalMatrixDense& b);
bool is_zero(const RationalMatrixDense& m);
/// Rank by fraction-exact Gaussian elimination.
std::size_t exact_rank(RationalMatrixDense m);

/// The alternating Čech complex of the nerve with constant coefficients.
struct CechComplex {
  std::vector<std::vector<std::vector<int>>> basis;  // basis[q] = nonempty (q+1)-tuples
  std::vector<RationalMatrixDense> coboundary;       // δ^q : C^q → C^{q+1}, q = 0..max_degree
};

CechComplex build_complex(const Cover& cover, int max_degree);

/// dim H^q = nullity δ^q − rank δ^{q−1} for q = 0..max_degree.
std::vector<int> cohomology_dims(const CechComplex& cx);

/// True when δ^{q+1}δ^q = 0 exactly for every q.
bool coboundary_squares_to_zero(const CechComplex& cx);

/// Inputs of the de Rham comparison on one bundled fixture.
struct DeRhamFixture {
  std::string name;
  Cover cover;
  int max_degree = 1;
  std::optional<SmoothMap> contraction;         // global h: I × S → S, if S is contractible
  std::vector<GeneratorForm> battery;           // forms of degree ≥ 1
  std::vector<SingularCube> certificate_cubes;  // for closedness, by degree p+1
  std::vector<SingularCube> test_cubes;         // for dβ − α, by degree
  std::optional<GeneratorForm> period_form;
  std::optional<CubicalChain> cycle;
};

struct DeRhamReport {
  std::string fixture;
  std::vector<int> dims;
  std::size_t closed_forms = 0;
  std::size_t exact_checked = 0;
  double max_exactness_residual = 0.0;
  std::optional<double> period;
  bool consistent = false;
  std::string note;
};

/// Forms certified closed in degrees where the Čech side predicts no
/// cohomology must have Poincaré antiderivatives with dβ = α on the test
/// cubes; where H^q ≠ 0 the period form must have a nonzero period.
DeRhamReport de_rham_spotcheck(const DeRhamFixture& fixture, double closed_tol = 1e-9, double exact_tol = 1e-7,
                               const QuadratureRule& rule = {});

}  // namespace diffspace
