#include <doctest.h>

#include <cmath>
#include <random>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/smooth_map.hpp"
#include "oracles.hpp"

using namespace diffspace;

TEST_CASE("parser evaluates infix expressions") {
  const SmoothMap f = parse_map({"x1^2 + 3*x2", "sin(x1)*exp(x2) - sqrt(x2)", "-x1^3/2"}, 2);
  const auto v = f.evaluate(std::vector<double>{2.0, 1.0});
  CHECK(v[0] == doctest::Approx(7.0));
  CHECK(v[1] == doctest::Approx(std::sin(2.0) * std::exp(1.0) - 1.0));
  CHECK(v[2] == doctest::Approx(-4.0));
  CHECK(parse_map({"pi"}, 1).evaluate_scalar(std::vector<double>{0.0}) == doctest::Approx(M_PI));
  CHECK(parse_map({"t^2 + x"}, 2, {"t", "x"}).evaluate_scalar(std::vector<double>{3.0, 1.0}) == doctest::Approx(10.0));
}

TEST_CASE("parse errors carry a location") {
  struct Case {
    const char* text;
    int column;
  };
  for (const Case c : {Case{"x1 + * x2", 6}, Case{"x3", 1}, Case{"tan(x1)", 1}, Case{"x1 +", 5}, Case{"(x1", 4}}) {
    CAPTURE(c.text);
    try {
      parse_map({c.text}, 2);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
      CHECK(e.column() == c.column);
    }
  }
}

TEST_CASE("partial primitives raise outside their domain") {
  CHECK_THROWS_AS(parse_map({"log(x1)"}, 1).evaluate(std::vector<double>{-1.0}), EvalError);
  CHECK_THROWS_AS(parse_map({"1/x1"}, 1).evaluate(std::vector<double>{0.0}), EvalError);
  CHECK_THROWS_AS(parse_map({"sqrt(x1)"}, 1).evaluate(std::vector<double>{-0.5}), EvalError);
}

TEST_CASE("jets agree with central differences") {
  const SmoothMap f = parse_map({"x1^3*x2 - cos(x1*x2)", "exp(x1 - x2^2)", "bump(x1)*x2 + log(1 + x1^2)"}, 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 25; ++k) {
    const std::vector<double> x{u(rng), u(rng)};
    const Jet j = f.jet(x);
    const Eigen::MatrixXd fd = oracle::fd_jacobian(f, x);
    CHECK((j.jacobian - fd).cwiseAbs().maxCoeff() < 1e-6);
    const auto v = f.evaluate(x);
    for (int i = 0; i < 3; ++i) CHECK(j.value[i] == doctest::Approx(v[i]).epsilon(1e-14));
  }
}

TEST_CASE("directional derivatives match the Jacobian") {
  const SmoothMap f = parse_map({"x1*x2*x3", "sin(x1) + x3^2"}, 3);
  const std::vector<double> x{0.3, -0.7, 1.1};
  Eigen::MatrixXd dirs(3, 2);
  dirs << 1, 0.5, -2, 0, 0.25, 3;
  const Eigen::MatrixXd expected = f.jet(x).jacobian * dirs;
  CHECK((f.derivatives_along(x, dirs) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("bump function is flat at the origin") {
  const SmoothMap h = parse_map({"bump(x1)"}, 1);
  CHECK(h.evaluate_scalar(std::vector<double>{0.0}) == 0.0);
  CHECK(h.evaluate_scalar(std::vector<double>{1.0}) == doctest::Approx(std::exp(-1.0)));
  // h'(u) = 2u⁻³e^{−u⁻²}, so h'(1) = 2/e.
  CHECK(h.gradient(std::vector<double>{1.0})[0] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  const SmoothMap d1 = partial_derivative(h, 0);
  const SmoothMap d2 = partial_derivative(d1, 0);
  CHECK(d1.evaluate_scalar(std::vector<double>{0.0}) == 0.0);
  CHECK(d2.evaluate_scalar(std::vector<double>{0.0}) == 0.0);
  CHECK(d2.gradient(std::vector<double>{0.0})[0] == 0.0);
}

TEST_CASE("rational evaluation is exact") {
  const SmoothMap f = parse_map({"0.1*x1 - 1/3*x2", "x1^2*x2 - x2^3"}, 2);
  const std::vector<Rational> x{Rational(10), Rational(3)};
  const auto v = f.evaluate_as<Rational>(std::span<const Rational>(x));
  CHECK(v[0] == 0);
  CHECK(v[1] == Rational(273));
  const std::vector<Rational> y{Rational(1, 3), Rational(2, 7)};
  CHECK(f.evaluate_as<Rational>(std::span<const Rational>(y))[1] ==
        Rational(1, 9) * Rational(2, 7) - Rational(8, 343));
  CHECK_THROWS_AS(parse_map({"exp(x1)"}, 1).evaluate_as<Rational>(std::span<const Rational>(x.data(), 1)), EvalError);
}

TEST_CASE("composition follows the chain rule") {
  const SmoothMap g = parse_map({"x1*x2", "x1 + sin(x2)"}, 2);
  const SmoothMap f = parse_map({"exp(x1)*x2", "x1^2 - x2"}, 2);
  const SmoothMap fg = compose(f, g);
  const std::vector<double> x{0.4, -1.2};
  const Point gx = g.evaluate(x);
  const Eigen::MatrixXd expected = f.jet(gx).jacobian * g.jet(x).jacobian;
  CHECK((fg.jet(x).jacobian - expected).cwiseAbs().maxCoeff() < 1e-13);
  const SmoothMap s = stack({g, f});
  CHECK(s.output_dim() == 4);
  CHECK(s.evaluate(x)[3] == doctest::Approx(f.evaluate(x)[1]));
}

TEST_CASE("arithmetic on maps") {
  const SmoothMap a = parse_map({"x1"}, 1), b = parse_map({"x1^2"}, 1);
  const std::vector<double> x{3.0};
  CHECK((a + b).evaluate_scalar(x) == 12.0);
  CHECK((a - b).evaluate_scalar(x) == -6.0);
  CHECK((a * b).evaluate_scalar(x) == 27.0);
  CHECK((b / a).evaluate_scalar(x) == 3.0);
  CHECK(pow(a, 3).evaluate_scalar(x) == 27.0);
  CHECK((2.0 * a).evaluate_scalar(x) == 6.0);
  CHECK(lift_over_interval(b).evaluate_scalar(std::vector<double>{0.7, 3.0}) == 9.0);
  CHECK(fix_first_input(parse_map({"x1*x2"}, 2), 2.0).evaluate_scalar(x) == 6.0);
  CHECK(SmoothMap::coordinate(3, 1).evaluate_scalar(std::vector<double>{1, 2, 3}) == 2.0);
  CHECK_FALSE(b.depends_on(1));
}
