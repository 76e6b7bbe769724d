#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diffspace/diff_space.hpp"
#include "diffspace/forms.hpp"
#include "diffspace/group_action.hpp"

namespace diffspace {

using RationalPoint = std::vector<Rational>;

/// max over g, x of |f(g·x) − f(x)| (all outputs).
double check_invariance(const SmoothMap& f, const FiniteGroupAction& G, const std::vector<Point>& samples);

/// The same residual in exact arithmetic; f must be rational-evaluable.
Rational check_invariance_exact(const SmoothMap& f, const FiniteGroupAction& G,
                                const std::vector<RationalPoint>& samples);

/// (1/|G|) Σ_g f∘g.
SmoothMap average_invariant(const SmoothMap& f, const FiniteGroupAction& G);

/// (1/|G|) Σ_g g⁻¹·Y(g·x), an equivariant field.
SmoothMap average_vector_field(const SmoothMap& Y, const FiniteGroupAction& G);

/// max over the relations of |r(π(x))| in exact arithmetic.
Rational exact_relation_residual(const HilbertMap& hilbert, const std::vector<RationalPoint>& samples);

struct HilbertResiduals {
  double invariance = 0.0;
  double relation = 0.0;
  double inequality = 0.0;  // largest violation max(0, −g(π(x)))
};

HilbertResiduals hilbert_residuals(const HilbertMap& hilbert, const FiniteGroupAction& G,
                                   const std::vector<Point>& samples);

/// The orbit space as a subset of the Hilbert image.
struct OrbitSpaceModel {
  SpacePtr space;      // in image coordinates
  SpacePtr upstairs;
  HilbertMap hilbert;
  std::vector<RationalMatrix> group;
};

/// Builds the image model after checking invariance, relations and orbit
/// separation (pairs of probes with equal images must share an orbit).
/// ValidationError when a check fails.
OrbitSpaceModel orbit_pushforward(const SpacePtr& upstairs, const FiniteGroupAction& G, const HilbertMap& hilbert,
                                  std::uint64_t seed = 0, std::size_t probes = 256);

/// h(t, x)_i = base_i + t^{w_i}(x_i − base_i) on I × S, validated by sampling
/// that h(t, x) stays in S.  Empty weights mean all ones.
SmoothMap build_contraction(const SpacePtr& space, const Point& base, std::vector<int> weights = {},
                            std::uint64_t seed = 0, std::size_t samples = 128);

/// θ ∈ [0, 2π] ↦ (R cos θ, R sin θ).
SingularCube circle_cube(const SpacePtr& plane, double radius);

struct ScalingRow {
  std::string family;
  double radius = 0.0;
  double value = 0.0;
  bool vanishing = false;
  int order = 0;
  int panels = 0;
  bool converged = true;
};

struct SlopeFit {
  std::string family;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  std::vector<SlopeFit> fits;  // empty with fewer than two radii
};

/// Least squares for log|y| = slope·log x + intercept.
SlopeFit fit_loglog(const std::string& family, const std::vector<double>& x, const std::vector<double>& y);

/// The families integrated over γ_R by scaling_experiment, in report order.
std::vector<std::pair<std::string, GeneratorForm>> scaling_families(const SpacePtr& plane);

/// Integrals of the scaling families over γ_R for every radius, with slope
/// fits for the nonvanishing ones.  Radii must be positive.
ScalingTable scaling_experiment(const std::vector<double>& radii, const QuadratureRule& rule = {});

}  // namespace diffspace
