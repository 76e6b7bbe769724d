#include <doctest.h>

#include <cmath>
#include <random>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"
#include "diffspace/orbit.hpp"
#include "oracles.hpp"

using namespace diffspace;

namespace {

RationalMatrix mat(std::vector<Rational> e) { return RationalMatrix(2, std::move(e)); }

std::vector<RationalPoint> rational_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 17);
  std::vector<RationalPoint> out(n);
  for (auto& p : out) p = {Rational(num(rng), den(rng)), Rational(num(rng), den(rng))};
  return out;
}

}  // namespace

TEST_CASE("finite groups from generators") {
  const FiniteGroupAction rot = FiniteGroupAction::generated_by({mat({0, -1, 1, 0})});
  CHECK(rot.order() == 4);
  CHECK(FiniteGroupAction::generated_by({mat({0, -1, 1, 0}), mat({1, 0, 0, -1})}).order() == 8);
  CHECK(fixtures::z2_action().order() == 2);
  CHECK_THROWS_AS(FiniteGroupAction::generated_by({mat({2, 0, 0, 1})}), ValidationError);
  CHECK_THROWS_AS(FiniteGroupAction({RationalMatrix::identity(2), mat({-1, 0, 0, 1}), mat({1, 0, 0, -1})}),
                  ValidationError);
  CHECK(mat({Rational(1, 2), 3, 1, 4}).determinant() == Rational(-1));
}

TEST_CASE("Hilbert map is invariant and satisfies its relation exactly") {
  const HilbertMap h = fixtures::z2_hilbert();
  const auto pts = rational_points(200, 4);
  CHECK(check_invariance_exact(h.components, fixtures::z2_action(), pts) == 0);
  CHECK(exact_relation_residual(h, pts) == 0);
  CHECK(check_invariance_exact(parse_map({"x1 + x2^2"}, 2), fixtures::z2_action(), pts) != 0);
  const HilbertResiduals r = hilbert_residuals(h, fixtures::z2_action(), fixtures::plane()->sample(1, 300));
  CHECK(r.invariance == 0.0);
  CHECK(r.relation < 1e-12);
  CHECK(r.inequality == 0.0);
}

TEST_CASE("averaging produces invariants") {
  const FiniteGroupAction G = fixtures::z2_action();
  const auto pts = fixtures::plane()->sample(2, 50);
  CHECK(check_invariance(average_invariant(parse_map({"x1 + x1*x2 + x2^3"}, 2), G), G, pts) < 1e-15);
  const SmoothMap avg = average_invariant(parse_map({"x1 + x1*x2"}, 2), G);
  for (const auto& p : pts) CHECK(avg.evaluate_scalar(p) == doctest::Approx(p[0] * p[1]));
  const SmoothMap Y = average_vector_field(parse_map({"1 + x1", "x2^2"}, 2), G);
  for (const auto& p : pts) {
    const Point v = Y.evaluate(p);
    CHECK(v[0] == doctest::Approx(p[0]));
    CHECK(std::abs(v[1]) < 1e-15);
  }
}

TEST_CASE("orbit space model of the reflection through the origin") {
  const OrbitSpaceModel cone = fixtures::z2_cone();
  CHECK(cone.space->ambient_dim() == 3);
  CHECK(cone.space->contains(std::vector<double>{1.0, 2.0, 4.0}));
  CHECK_FALSE(cone.space->contains(std::vector<double>{1.0, 3.0, 4.0}));
  CHECK_FALSE(cone.space->contains(std::vector<double>{-1.0, 0.0, 0.0}));
  HilbertMap weak = fixtures::z2_hilbert();
  weak.components = parse_map({"x1^2", "x2^2"}, 2);
  weak.relations.clear();
  weak.inequalities = {parse_map({"x1"}, 2), parse_map({"x2"}, 2)};
  CHECK_THROWS_AS(orbit_pushforward(fixtures::plane(), fixtures::z2_action(), weak), ValidationError);
  HilbertMap variant = fixtures::z2_hilbert();
  variant.components = parse_map({"x1^2", "x1", "x2^2"}, 2);
  CHECK_THROWS_AS(orbit_pushforward(fixtures::plane(), fixtures::z2_action(), variant), ValidationError);
}

TEST_CASE("contraction of the cone") {
  const OrbitSpaceModel cone = fixtures::z2_cone();
  const SmoothMap h = fixtures::z2_cone_contraction(cone.space);
  const Point p{1.0, -2.0, 4.0};
  CHECK(h.evaluate(std::vector<double>{1.0, 1.0, -2.0, 4.0}) == p);
  CHECK(h.evaluate(std::vector<double>{0.0, 1.0, -2.0, 4.0}) == Point{0.0, 0.0, 0.0});
  CHECK(cone.space->contains(h.evaluate(std::vector<double>{0.3, 1.0, -2.0, 4.0})));
  CHECK_THROWS_AS(build_contraction(fixtures::circle(), {1.0, 0.0}), ValidationError);
}

TEST_CASE("log-log fit") {
  const SlopeFit f = fit_loglog("f", {0.5, 1, 2, 4}, {0.75, 3, 12, 48});
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_loglog("f", {1.0}, {1.0}), DimensionError);
}

TEST_CASE("scaling over circles") {
  const ScalingTable t = scaling_experiment({0.5, 1.0, 2.0, 4.0});
  std::map<std::string, std::vector<double>> values;
  std::size_t vanishing = 0;
  for (const auto& r : t.rows) {
    values[r.family].push_back(r.value);
    if (r.vanishing) {
      ++vanishing;
      CHECK(std::abs(r.value) < 1e-9);
    }
  }
  CHECK(vanishing == 8 * 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(values["y2_dxy"][i] + values["x2_dxy"][i]) < 1e-9);
  for (const auto& f : t.fits) {
    if (f.family == "omega") CHECK(std::abs(f.slope - 2.0) < 0.02);
    if (f.family == "x2_dxy") CHECK(std::abs(f.slope - 4.0) < 0.05);
  }
  CHECK(scaling_experiment({1.0}).fits.empty());
  CHECK_THROWS_AS(scaling_experiment({1.0, 0.0}), DimensionError);
  CHECK_THROWS_AS(circle_cube(fixtures::plane(), -1.0), DimensionError);
}

TEST_CASE("generated forms of invariants scale at least like R⁴") {
  // f₀ df₁ with f₀, f₁ invariant quadratics integrates to O(R⁴), unlike x dy − y dx.
  const SpacePtr plane = fixtures::plane();
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> c(-3, 3);
  const std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
  int fitted = 0;
  for (int k = 0; k < 20; ++k) {
    auto quad = [&] {
      return std::to_string(c(rng)) + "*x1^2 + " + std::to_string(c(rng)) + "*x1*x2 + " + std::to_string(c(rng)) +
             "*x2^2";
    };
    const GeneratorForm w = GeneratorForm::lambda(plane, {parse_map({quad()}, 2), parse_map({quad()}, 2)});
    std::vector<double> v;
    for (double R : radii) v.push_back(pair(w, circle_cube(plane, R)));
    if (std::abs(v[1]) < 1e-6) continue;
    ++fitted;
    CHECK(fit_loglog("w", radii, v).slope >= 3.9);
  }
  CHECK(fitted >= 5);
}
