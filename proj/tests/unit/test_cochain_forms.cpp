#include <doctest.h>

#include <cmath>
#include <random>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"
#include "diffspace/forms.hpp"
#include "diffspace/orbit.hpp"
#include "oracles.hpp"

using namespace diffspace;

namespace {

GeneratorForm form(const SpacePtr& s, std::vector<std::string> entries, double c = 1.0) {
  std::vector<SmoothMap> maps;
  for (const auto& e : entries) maps.push_back(parse_map({e}, s->ambient_dim()));
  return GeneratorForm::lambda(s, maps, c);
}

double pairing_gap(const GeneratorForm& a, const GeneratorForm& b, const SingularCube& c) {
  return std::abs(pair(a, c) - pair(b, c));
}

}  // namespace

TEST_CASE("degree-0 pairing is evaluation") {
  const SpacePtr plane = fixtures::plane();
  const SingularCube pt = make_cube(Box(), SmoothMap::constant(0, {0.5, 2.0}), plane);
  CHECK(lambda_eval(form(plane, {"x1*x2 + 1"}), pt) == doctest::Approx(2.0));
}

TEST_CASE("x² d(xy) over a circle against a θ-quadrature oracle") {
  const SpacePtr plane = fixtures::plane();
  const GeneratorForm a = form(plane, {"x1^2", "x1*x2"});
  for (double R : {0.5, 1.0, 3.0}) {
    // x² · d(xy)/dθ with x = R cos θ, y = R sin θ.
    const double expected = oracle::periodic_trapezoid([R](double t) {
      const double x = R * std::cos(t);
      return x * x * R * R * std::cos(2 * t);
    });
    CHECK(pair(a, circle_cube(plane, R)) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("wedge of x dy and y dx over the unit square") {
  // (x dy) ∧ (y dx) = −xy dx∧dy, whose integral over [0,1]² is −1/4.
  const SpacePtr plane = fixtures::plane();
  const GeneratorForm w = wedge(form(plane, {"x1", "x2"}), form(plane, {"x2", "x1"}));
  CHECK(w.degree() == 2);
  CHECK(pair(w, identity_cube(plane, 2)) == doctest::Approx(-0.25).epsilon(1e-14));
  const double oracle_value = -oracle::simpson([](double x) { return oracle::simpson([x](double y) { return x * y; }, 0, 1, 20); }, 0, 1, 20);
  CHECK(pair(w, identity_cube(plane, 2)) == doctest::Approx(oracle_value).epsilon(1e-12));
}

TEST_CASE("generator pairing agrees with the classical evaluator") {
  std::mt19937_64 rng(21);
  const SpacePtr r3 = euclidean_space(3, 1.0);
  for (int k = 0; k < 20; ++k) {
    const int p = 1 + k % 3;
    const GeneratorForm a = random_polynomial_form(r3, p, 3, 2, rng);
    const SingularCube c = fixtures::random_affine_cube(r3, p, rng);
    CHECK(std::abs(lambda_eval(a, c) - classical_eval(a, c)) < 1e-10);
  }
  const SpacePtr plane = fixtures::plane();
  const GeneratorForm a = form(plane, {"exp(x1)", "sin(x2)*x1"});
  const SingularCube c = make_cube(Box::unit(1), parse_map({"cos(x1)", "x1^2"}, 1), plane);
  CHECK(std::abs(lambda_eval(a, c) - classical_eval(a, c)) < 1e-10);
}

TEST_CASE("d squared pairs to zero") {
  std::mt19937_64 rng(2);
  const SpacePtr r3 = euclidean_space(3, 1.0);
  for (int k = 0; k < 8; ++k) {
    const int p = k % 2;
    const GeneratorForm dd = exterior_derivative(exterior_derivative(random_polynomial_form(r3, p, 3, 2, rng)));
    CHECK(std::abs(pair(dd, fixtures::random_affine_cube(r3, p + 2, rng))) < 1e-12);
  }
}

TEST_CASE("Stokes on random forms and boxes") {
  std::mt19937_64 rng(8);
  const SpacePtr r3 = euclidean_space(3, 1.0);
  for (int k = 0; k < 10; ++k) {
    const int p = k % 3;
    const GeneratorForm a = random_polynomial_form(r3, p, 4, 2, rng);
    CHECK(stokes_residual(a, fixtures::random_affine_cube(r3, p + 1, rng)) < 1e-8);
  }
  // Curved cube through a non-polynomial form.
  const SpacePtr plane = fixtures::plane();
  const SingularCube c = make_cube(Box::unit(2), parse_map({"x1*cos(x2)", "x1*sin(x2) + x1^2"}, 2), plane);
  CHECK(stokes_residual(form(plane, {"exp(x1)*x2", "sin(x1 + x2)"}), c) < 1e-8);
}

TEST_CASE("Leibniz rule for the wedge") {
  std::mt19937_64 rng(13);
  const SpacePtr r3 = euclidean_space(3, 1.0);
  for (int p = 0; p <= 1; ++p) {
    const GeneratorForm a = random_polynomial_form(r3, p, 2, 2, rng);
    const GeneratorForm b = random_polynomial_form(r3, 1, 2, 2, rng);
    const GeneratorForm lhs = exterior_derivative(wedge(a, b));
    const GeneratorForm rhs =
        wedge(exterior_derivative(a), b) + (p % 2 ? -1.0 : 1.0) * wedge(a, exterior_derivative(b));
    for (int k = 0; k < 3; ++k) CHECK(pairing_gap(lhs, rhs, fixtures::random_affine_cube(r3, p + 2, rng)) < 1e-10);
  }
}

TEST_CASE("pullback is natural") {
  const SpacePtr plane = fixtures::plane();
  const SmoothMap F = parse_map({"x1^2 - x2", "x1*x2"}, 2);
  const GeneratorForm a = form(plane, {"x2", "x1"});
  const GeneratorForm Fa = pullback_form(F, a, plane);
  const SingularCube c = make_cube(Box::unit(1), parse_map({"x1", "1 - x1^2"}, 1), plane);
  const SingularCube Fc = make_cube(c.box, compose(F, c.representative), plane);
  CHECK(pair(Fa, c) == doctest::Approx(pair(a, Fc)).epsilon(1e-12));
  CHECK_THROWS_AS(pullback_form(F, form(fixtures::circle(), {"x1", "x2"}), plane), MembershipError);
}

TEST_CASE("chain rule for generated functions") {
  const SpacePtr plane = fixtures::plane();
  const std::vector<StructureElement> g{{parse_map({"x1*x2"}, 2), plane}, {parse_map({"sin(x1)"}, 2), plane}};
  const SmoothMap F = parse_map({"exp(x1)*x2^2"}, 2);
  const SingularCube seg = make_cube(Box::unit(1), parse_map({"x1 - 0.5", "2*x1"}, 1), plane);
  CHECK(chain_rule_residual(F, g, {seg}) < 1e-9);
}

TEST_CASE("homotopy operator integrates along the fiber") {
  const SpacePtr plane = fixtures::plane();
  const SpacePtr ip = product_with_interval(plane);
  // ω = t² x dt on I × ℝ²: K*ω = (1/3) x as a 0-form.
  const GeneratorForm w = form(ip, {"x1^2*x2", "x1"});
  const GeneratorForm k = homotopy_operator(w, plane);
  CHECK(k.degree() == 0);
  const SingularCube pt = make_cube(Box(), SmoothMap::constant(0, {1.5, -2.0}), plane);
  CHECK(pair(k, pt) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(prism_pullback(form(ip, {"x2", "x3"}), plane).terms().empty());
  CHECK_THROWS_AS(prism_pullback(form(ip, {"x2", "x1*x2"}), plane), ValidationError);
}

TEST_CASE("cochain homotopy identity") {
  std::mt19937_64 rng(17);
  const SpacePtr plane = fixtures::plane();
  const SpacePtr ip = product_with_interval(plane);
  for (int p = 1; p <= 2; ++p) {
    const GeneratorForm w = random_polynomial_form(ip, p, 3, 2, rng);
    const GeneratorForm lhs =
        exterior_derivative(homotopy_operator(w, plane)) + homotopy_operator(exterior_derivative(w), plane);
    const GeneratorForm rhs = endpoint_pullback(1, w, plane) - endpoint_pullback(0, w, plane);
    for (int k = 0; k < 3; ++k) CHECK(pairing_gap(lhs, rhs, fixtures::random_affine_cube(plane, p, rng)) < 1e-7);
  }
}

TEST_CASE("Poincaré antiderivative on the plane") {
  std::mt19937_64 rng(31);
  const SpacePtr plane = fixtures::plane();
  const SmoothMap h = build_contraction(plane, {0.0, 0.0});
  std::vector<SingularCube> cert;
  for (int k = 0; k < 4; ++k) cert.push_back(fixtures::random_affine_cube(plane, 2, rng));
  const GeneratorForm a = exterior_derivative(form(plane, {"x1^2*x2 + sin(x2)"}));
  const GeneratorForm b = poincare_antiderivative(a, h, cert);
  for (int k = 0; k < 3; ++k) {
    const SingularCube c = fixtures::random_affine_cube(plane, 1, rng);
    CHECK(std::abs(pair(exterior_derivative(b), c) - pair(a, c)) < 1e-7);
  }
  CHECK_THROWS_AS(poincare_antiderivative(form(plane, {"x1", "x2"}), h, cert), ValidationError);
  CHECK(certify_closed(a, cert, 1e-9).passed);
}
