#pragma once

#include <random>
#include <string>
#include <vector>

#include "diffspace/cech.hpp"
#include "diffspace/chains.hpp"
#include "diffspace/flow.hpp"
#include "diffspace/forms.hpp"
#include "diffspace/orbit.hpp"

// Bundled spaces, fields, covers and batteries shared by the command-line
// runner, the tests and the Python module.
namespace diffspace::fixtures {

SpacePtr plane();
SpacePtr line();

/// S = {y² − h(x)y = 0} with h = bump: the graph of h glued to the x-axis.
SpacePtr bump_variety();
SmoothMap bump_variety_equation();
/// x³∂x + 2y∂y, tangent to S, with the derivation value ∂x at the origin.
VectorFieldModel bump_variety_field();
/// Integral curve through (1, e⁻¹) at t = 0: ((1 − 2t)^{−1/2}, e^{2t−1}).
Point bump_variety_curve(double t);
StepControl bump_variety_control();

/// S = {x₁² + (1 − x₂)² < 1} ∪ {x₂ = 0}, not locally closed at the origin.
SpacePtr disk_with_axis();
VectorFieldModel disk_with_axis_field();
/// Points at heights r·10^{−k} above the origin plus axis points.
LocalSampler disk_with_axis_sampler();

SpacePtr circle();
SpacePtr unit_interval();

FiniteGroupAction z2_action();
HilbertMap z2_hilbert();
OrbitSpaceModel z2_cone();
/// h(t, π) = t²π, the scaling induced by t·x upstairs.
SmoothMap z2_cone_contraction(const SpacePtr& cone);

Cover plane_cover(bool refined);
Cover circle_cover(int arcs);
Cover interval_cover(int sets);
Cover cone_cover(const SpacePtr& cone, bool refined);

/// Affine p-cube s ↦ c + A·s on a random box inside [−scale, scale]ⁿ.
SingularCube random_affine_cube(const SpacePtr& euclidean, int p, std::mt19937_64& rng, double scale = 1.0);
/// π∘τ for a random affine p-cube τ upstairs.
SingularCube random_cone_cube(const OrbitSpaceModel& cone, int p, std::mt19937_64& rng, double scale = 1.0);

/// Closed forms: exact 1-forms d(f) and arbitrary top-degree forms.
std::vector<GeneratorForm> closed_form_battery(const SpacePtr& space, int count, std::mt19937_64& rng,
                                               int max_degree);

DeRhamFixture derham_fixture(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> derham_fixture_names();

}  // namespace diffspace::fixtures
