#include <doctest.h>

#include <cmath>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"
#include "diffspace/flow.hpp"

using namespace diffspace;

namespace {

VectorFieldModel linear_field() { return VectorFieldModel(fixtures::line(), parse_map({"x1"}, 1)); }

}  // namespace

TEST_CASE("derivations satisfy Leibniz") {
  const SpacePtr s = fixtures::plane();
  const TangentVector v{{0.3, -0.8}, Eigen::Vector2d(1.5, -0.5)};
  const StructureElement f{parse_map({"sin(x1)*x2"}, 2), s};
  const StructureElement g{parse_map({"exp(x2) + x1^2"}, 2), s};
  const StructureElement fg{f.representative * g.representative, s};
  CHECK(derivation_apply(v, fg) == doctest::Approx(derivation_apply(v, f) * g(v.base) + f(v.base) * derivation_apply(v, g)));
  CHECK_THROWS_AS(derivation_apply(TangentVector{{0.0, 0.5}, Eigen::Vector2d(1, 0)},
                                   StructureElement{parse_map({"x1"}, 2), fixtures::bump_variety()}),
                  MembershipError);
}

TEST_CASE("tangency certificate is checked at construction") {
  const SpacePtr circle = fixtures::circle();
  const SmoothMap H = parse_map({"x1^2 + x2^2 - 1"}, 2);
  CHECK_NOTHROW(VectorFieldModel(circle, parse_map({"-x2", "x1"}, 2), {H}));
  CHECK_THROWS_AS(VectorFieldModel(circle, parse_map({"1", "0"}, 2), {H}), ValidationError);
  const VectorFieldModel Z = fixtures::bump_variety_field();
  CHECK(Z.tangency_residual(Z.space()->sample(1, 400)) < 1e-8);
}

TEST_CASE("bump variety curve matches its closed form") {
  const VectorFieldModel Z = fixtures::bump_variety_field();
  const Point x0{1.0, std::exp(-1.0)};
  const IntegralCurveResult r = integrate_curve(Z, x0, {-10.0, 0.0}, fixtures::bump_variety_control());
  CHECK(r.backward.reason == ExitReason::kMaxTime);
  CHECK(r.domain_min() == -10.0);
  double err = 0.0, res = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const Point g = fixtures::bump_variety_curve(r.times[i]);
    err = std::max({err, std::abs(g[0] - r.points[i][0]), std::abs(g[1] - r.points[i][1])});
    res = std::max(res, r.residuals[i]);
  }
  CHECK(err < 1e-6);
  CHECK(res < 1e-8);
}

TEST_CASE("bump variety curve blows up forward at t = 1/2") {
  const IntegralCurveResult r = integrate_curve(fixtures::bump_variety_field(), {1.0, std::exp(-1.0)}, {0.0, 1.0},
                                                fixtures::bump_variety_control());
  CHECK(r.forward.reason == ExitReason::kBlowUp);
  CHECK(r.domain_max() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("the origin of the bump variety has a one-point domain") {
  const IntegralCurveResult r =
      integrate_curve(fixtures::bump_variety_field(), {0.0, 0.0}, {-1.0, 1.0}, fixtures::bump_variety_control());
  CHECK(r.collapsed());
  CHECK(to_string(r.exit_reason) == "collapsed-to-point");
  CHECK(r.domain_length() < 1e-9);
  CHECK_FALSE(r.open_interval());
  CHECK_THROWS_AS(flow_at(fixtures::bump_variety_field(), {0.0, 0.0}, 0.1, fixtures::bump_variety_control()),
                  EvalError);

  // Without the prescribed value at the origin the field vanishes there.
  const VectorFieldModel bare(fixtures::bump_variety(), parse_map({"x1^3", "2*x2"}, 2),
                              {fixtures::bump_variety_equation()});
  const IntegralCurveResult e = integrate_curve(bare, {0.0, 0.0}, {-1.0, 1.0});
  CHECK(e.exit_reason == ExitReason::kMaxTime);
  CHECK(e.domain_length() == 2.0);
}

TEST_CASE("leaving the space is located by bisection") {
  const VectorFieldModel X(fixtures::unit_interval(), parse_map({"1"}, 1));
  const IntegralCurveResult r = integrate_curve(X, {0.25}, {-2.0, 2.0});
  CHECK(r.forward.reason == ExitReason::kLeftSpace);
  CHECK(r.backward.reason == ExitReason::kLeftSpace);
  // The event is where the residual crosses the 1e-8 membership tolerance.
  CHECK(std::abs(r.domain_max() - (0.75 + 1e-8)) < 1e-9);
  CHECK(std::abs(r.domain_min() + (0.25 + 1e-8)) < 1e-9);
  for (const auto& p : r.points) CHECK(fixtures::unit_interval()->contains(p));
}

TEST_CASE("flow_at follows the exponential") {
  const VectorFieldModel X = linear_field();
  CHECK(flow_at(X, {2.0}, 1.0)[0] == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-8));
  CHECK(flow_at(X, {2.0}, -1.5)[0] == doctest::Approx(2.0 * std::exp(-1.5)).epsilon(1e-8));
}

TEST_CASE("fixed-step error decays at fifth order") {
  const VectorFieldModel X = linear_field();
  auto error = [&](double h) {
    StepControl c;
    c.fixed_step = h;
    const IntegralCurveResult r = integrate_curve(X, {1.0}, {0.0, 2.0}, c);
    return std::abs(r.points.back()[0] - std::exp(r.times.back()));
  };
  const double e1 = error(0.2), e2 = error(0.1), e3 = error(0.05);
  const double order1 = std::log2(e1 / e2), order2 = std::log2(e2 / e3);
  MESSAGE("observed orders " << order1 << ", " << order2);
  CHECK(order1 > 4.5);
  CHECK(order2 > 4.5);
  CHECK(order2 < 5.5);
}

TEST_CASE("adaptive error tracks the tolerance") {
  const VectorFieldModel X = linear_field();
  auto error = [&](double rtol) {
    StepControl c;
    c.rtol = rtol;
    c.atol = rtol * 1e-3;
    return std::abs(flow_at(X, {1.0}, 3.0, c)[0] - std::exp(3.0));
  };
  CHECK(error(1e-10) < error(1e-6));
  CHECK(error(1e-10) < 1e-7);
}

TEST_CASE("disk with axis: domains are open but shrink near the origin") {
  const ProbeOptions o{10.0, 32, 0, StepControl{}, fixtures::disk_with_axis_sampler(), 1};
  const auto rows = uniform_epsilon_probe(fixtures::disk_with_axis_field(), {0.0, 0.0}, {1e-1, 1e-2, 1e-3}, o);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].open_domains == rows[i].samples);
    if (i > 0) CHECK(rows[i].min_domain_length <= rows[i - 1].min_domain_length);
  }
  CHECK(rows.back().min_domain_length < 1e-3);
}

TEST_CASE("equivariant flows commute with the group") {
  const VectorFieldModel X(fixtures::plane(), parse_map({"x1 - x2^2*x1", "x2 + x1"}, 2));
  const auto pts = fixtures::plane()->sample(4, 8);
  const CommutationReport rep = flow_commutation_check(X, fixtures::z2_action(), {-0.3, 0.2, 0.5}, pts);
  CHECK(rep.invariant);
  CHECK(rep.max_residual < 1e-8);

  const VectorFieldModel Y(fixtures::plane(), parse_map({"1", "0"}, 2));
  const CommutationReport bad = flow_commutation_check(Y, fixtures::z2_action(), {0.5}, pts);
  CHECK_FALSE(bad.invariant);
  CHECK(std::isnan(bad.max_residual));
}

TEST_CASE("Euler field pushes forward to the scaling on the cone") {
  const VectorFieldModel X(fixtures::plane(), parse_map({"x1", "x2"}, 2));
  const SmoothMap induced = parse_map({"2*x1", "2*x2", "2*x3"}, 3);
  const auto pts = fixtures::plane()->sample(9, 6);
  CHECK(pushforward_check(X, fixtures::z2_action(), fixtures::z2_hilbert(), induced, {-1.0, -0.5, 0.5, 1.0}, pts) <
        1e-6);
  CHECK_THROWS_AS(pushforward_check(X, fixtures::z2_action(), fixtures::z2_hilbert(),
                                    parse_map({"x1", "x2", "x3"}, 3), {1.0}, pts),
                  ValidationError);
}
