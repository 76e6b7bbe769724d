#include "diffspace/fixtures.hpp"

#include <cmath>
#include <numbers>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"

namespace diffspace::fixtures {

namespace {

SmoothMap expr(const std::string& text, int n) { return parse_map({text}, n); }

Membership positive(const SmoothMap& g) {
  Membership m;
  m.clauses.push_back({Constraint{Constraint::Kind::kPositive, g}});
  return m;
}

Membership all_of(std::vector<Constraint> constraints) {
  Membership m;
  m.clauses.push_back(std::move(constraints));
  return m;
}

// (t, x) ↦ c + t^w (x − c) on I × ℝⁿ.
SmoothMap radial_contraction(const Point& c, int weight = 1) {
  const int n = static_cast<int>(c.size());
  std::vector<NodePtr> comps;
  const NodePtr t = weight == 1 ? make_variable(0) : make_int_power(make_variable(0), weight);
  for (int i = 0; i < n; ++i) {
    const NodePtr x = make_variable(i + 1);
    const NodePtr ci = make_constant(c[static_cast<std::size_t>(i)]);
    comps.push_back(make_binary(BinaryOp::kAdd, ci,
                                make_binary(BinaryOp::kMul, t, make_binary(BinaryOp::kSub, x, ci))));
  }
  return SmoothMap(n + 1, std::move(comps));
}

SmoothMap affine_map(const Point& offset, const std::vector<Point>& columns) {
  const int p = static_cast<int>(columns.size());
  std::vector<NodePtr> comps;
  for (std::size_t i = 0; i < offset.size(); ++i) {
    NodePtr acc = make_constant(offset[i]);
    for (int j = 0; j < p; ++j)
      acc = make_binary(BinaryOp::kAdd, acc,
                        make_binary(BinaryOp::kMul, make_constant(columns[static_cast<std::size_t>(j)][i]),
                                    make_variable(j)));
    comps.push_back(acc);
  }
  return SmoothMap(p, std::move(comps));
}

struct AffineDraw {
  Box box;
  SmoothMap map;
};

AffineDraw draw_affine(int n, int p, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> lo(0.0, 0.4), hi(0.6, 1.0), u(-0.5 * scale, 0.5 * scale);
  std::vector<std::pair<double, double>> bounds;
  for (int i = 0; i < p; ++i) {
    const double a = lo(rng);
    bounds.emplace_back(a, hi(rng));
  }
  Point offset(static_cast<std::size_t>(n));
  for (auto& v : offset) v = u(rng);
  std::vector<Point> cols(static_cast<std::size_t>(p), Point(static_cast<std::size_t>(n)));
  for (auto& col : cols)
    for (auto& v : col) v = u(rng);
  return {Box(std::move(bounds)), affine_map(offset, cols)};
}

SingularCube angle_cube(const SpacePtr& circle, Box box, const SmoothMap& angle) {
  return make_cube(std::move(box), stack({cos(angle), sin(angle)}), circle);
}

}  // namespace

SpacePtr plane() { return euclidean_space(2, 2.0); }
SpacePtr line() { return euclidean_space(1, 2.0); }

SmoothMap bump_variety_equation() { return expr("x2^2 - bump(x1)*x2", 2); }

SpacePtr bump_variety() {
  Membership m;
  m.clauses.push_back({Constraint{Constraint::Kind::kEqualZero, bump_variety_equation()}});
  SamplerSpec spec;
  spec.parametrizations = {parse_map({"x1", "bump(x1)"}, 1), parse_map({"x1", "0"}, 1)};
  spec.ranges = {{{-2.0, 2.0}}, {{-2.0, 2.0}}};
  spec.fixed_points = {{0.0, 0.0}};
  return make_space("bump-variety", 2, std::move(m), make_sampler(std::move(spec)),
                    {SmoothMap::coordinate(2, 0), SmoothMap::coordinate(2, 1)});
}

VectorFieldModel bump_variety_field() {
  return VectorFieldModel(bump_variety(), parse_map({"x1^3", "2*x2"}, 2), {bump_variety_equation()},
                          {PointValue{{0.0, 0.0}, {1.0, 0.0}}});
}

Point bump_variety_curve(double t) { return {1.0 / std::sqrt(1.0 - 2.0 * t), std::exp(2.0 * t - 1.0)}; }

StepControl bump_variety_control() {
  StepControl c;
  c.rtol = 1e-10;
  c.atol = 1e-14;
  c.min_step = 1e-10;
  return c;
}

SpacePtr disk_with_axis() {
  Membership m;
  m.clauses.push_back({Constraint{Constraint::Kind::kPositive, expr("1 - x1^2 - (1 - x2)^2", 2)}});
  m.clauses.push_back({Constraint{Constraint::Kind::kEqualZero, expr("x2", 2)}});
  SamplerSpec spec;
  spec.parametrizations = {parse_map({"x1*cos(x2)", "1 + x1*sin(x2)"}, 2), parse_map({"x1", "0"}, 1)};
  spec.ranges = {{{0.0, 0.999}, {0.0, 2.0 * std::numbers::pi}}, {{-3.0, 3.0}}};
  spec.fixed_points = {{0.0, 0.0}};
  return make_space("disk-with-axis", 2, std::move(m), make_sampler(std::move(spec)),
                    {SmoothMap::coordinate(2, 0), SmoothMap::coordinate(2, 1)});
}

VectorFieldModel disk_with_axis_field() {
  return VectorFieldModel(disk_with_axis(), parse_map({"1", "0"}, 2), {expr("x2", 2)});
}

LocalSampler disk_with_axis_sampler() {
  const SpacePtr space = disk_with_axis();
  return [space](const Point& center, double r) {
    std::vector<Point> candidates{center};
    for (int k = 0; k <= 4; ++k) candidates.push_back({center[0], center[1] + r * std::pow(10.0, -k)});
    candidates.push_back({center[0] - 0.5 * r, center[1]});
    candidates.push_back({center[0] + 0.5 * r, center[1]});
    candidates.push_back({center[0] + 0.5 * r, center[1] + 0.5 * r});
    std::vector<Point> out;
    for (auto& x : candidates)
      if (space->contains(x)) out.push_back(std::move(x));
    return out;
  };
}

SpacePtr circle() {
  Membership m;
  m.clauses.push_back({Constraint{Constraint::Kind::kEqualZero, expr("x1^2 + x2^2 - 1", 2)}});
  SamplerSpec spec;
  spec.parametrizations = {parse_map({"cos(x1)", "sin(x1)"}, 1)};
  spec.ranges = {{{0.0, 2.0 * std::numbers::pi}}};
  return make_space("circle", 2, std::move(m), make_sampler(std::move(spec)),
                    {SmoothMap::coordinate(2, 0), SmoothMap::coordinate(2, 1)});
}

SpacePtr unit_interval() {
  Membership m = all_of({{Constraint::Kind::kNonNegative, expr("x1", 1)},
                         {Constraint::Kind::kNonNegative, expr("1 - x1", 1)}});
  SamplerSpec spec;
  spec.parametrizations = {SmoothMap::identity(1)};
  spec.ranges = {{{0.0, 1.0}}};
  spec.fixed_points = {{0.0}, {1.0}};
  return make_space("interval", 1, std::move(m), make_sampler(std::move(spec)), {SmoothMap::coordinate(1, 0)});
}

FiniteGroupAction z2_action() {
  return FiniteGroupAction::generated_by({RationalMatrix(2, {Rational(-1), Rational(0), Rational(0), Rational(-1)})});
}

HilbertMap z2_hilbert() {
  HilbertMap h;
  h.components = parse_map({"x1^2", "x1*x2", "x2^2"}, 2);
  h.relations = {expr("x2^2 - x1*x3", 3)};
  h.inequalities = {expr("x1", 3), expr("x3", 3)};
  return h;
}

OrbitSpaceModel z2_cone() { return orbit_pushforward(plane(), z2_action(), z2_hilbert()); }

SmoothMap z2_cone_contraction(const SpacePtr& cone) { return build_contraction(cone, {0.0, 0.0, 0.0}, {2, 2, 2}); }

Cover plane_cover(bool refined) {
  Cover c;
  c.space = plane();
  c.connectivity_scale = 0.3;
  const SmoothMap h = radial_contraction({0.0, 0.0});
  if (!refined) {
    c.regions = {{"plane", Membership{}}};
    c.contractions[{0}] = h;
    return c;
  }
  c.regions = {{"x>-1", positive(expr("x1 + 1", 2))}, {"x<1", positive(expr("1 - x1", 2))}};
  c.nonempty = {{0, 1}};
  c.contractions = {{{0}, h}, {{1}, h}, {{0, 1}, h}};
  return c;
}

Cover circle_cover(int arcs) {
  if (arcs != 3 && arcs != 4) throw ValidationError("circle covers come with 3 or 4 arcs");
  Cover c;
  c.space = circle();
  const double half_width = arcs == 3 ? 1.2 : 0.9;
  for (int i = 0; i < arcs; ++i) {
    const double a = 2.0 * std::numbers::pi * i / arcs;
    const SmoothMap g = std::cos(a) * SmoothMap::coordinate(2, 0) + std::sin(a) * SmoothMap::coordinate(2, 1) -
                        SmoothMap::constant_scalar(2, std::cos(half_width));
    c.regions.push_back({"arc" + std::to_string(i), positive(g)});
  }
  for (int i = 0; i + 1 < arcs; ++i) c.nonempty.push_back({i, i + 1});
  c.nonempty.push_back({0, arcs - 1});
  return c;
}

Cover interval_cover(int sets) {
  Cover c;
  c.space = unit_interval();
  if (sets == 2) {
    c.regions = {{"x<0.6", positive(expr("0.6 - x1", 1))}, {"x>0.4", positive(expr("x1 - 0.4", 1))}};
    c.nonempty = {{0, 1}};
    c.contractions = {{{0}, radial_contraction({0.0})},
                      {{1}, radial_contraction({1.0})},
                      {{0, 1}, radial_contraction({0.5})}};
  } else if (sets == 3) {
    c.regions = {{"x<0.4", positive(expr("0.4 - x1", 1))},
                 {"0.3<x<0.7", all_of({{Constraint::Kind::kPositive, expr("x1 - 0.3", 1)},
                                       {Constraint::Kind::kPositive, expr("0.7 - x1", 1)}})},
                 {"x>0.6", positive(expr("x1 - 0.6", 1))}};
    c.nonempty = {{0, 1}, {1, 2}};
    c.contractions = {{{0}, radial_contraction({0.0})},
                      {{1}, radial_contraction({0.5})},
                      {{2}, radial_contraction({1.0})},
                      {{0, 1}, radial_contraction({0.35})},
                      {{1, 2}, radial_contraction({0.65})}};
  } else {
    throw ValidationError("interval covers come with 2 or 3 sets");
  }
  return c;
}

Cover cone_cover(const SpacePtr& cone, bool refined) {
  Cover c;
  c.space = cone;
  c.connectivity_scale = 0.5;
  const SmoothMap h = radial_contraction({0.0, 0.0, 0.0}, 2);
  if (!refined) {
    c.regions = {{"cone", Membership{}}};
    c.contractions[{0}] = h;
    return c;
  }
  c.regions = {{"u>-1", positive(expr("x1 - x3 + 1", 3))}, {"u<1", positive(expr("1 - x1 + x3", 3))}};
  c.nonempty = {{0, 1}};
  c.contractions = {{{0}, h}, {{1}, h}, {{0, 1}, h}};
  return c;
}

SingularCube random_affine_cube(const SpacePtr& euclidean, int p, std::mt19937_64& rng, double scale) {
  AffineDraw d = draw_affine(euclidean->ambient_dim(), p, rng, scale);
  return make_cube(std::move(d.box), std::move(d.map), euclidean);
}

SingularCube random_cone_cube(const OrbitSpaceModel& cone, int p, std::mt19937_64& rng, double scale) {
  AffineDraw d = draw_affine(cone.upstairs->ambient_dim(), p, rng, scale);
  return make_cube(std::move(d.box), compose(cone.hilbert.components, d.map), cone.space);
}

std::vector<GeneratorForm> closed_form_battery(const SpacePtr& space, int count, std::mt19937_64& rng,
                                               int max_degree) {
  const int n = space->ambient_dim();
  const int top = std::min(n, 2);
  std::vector<GeneratorForm> out;
  for (int i = 0; i < count; ++i) {
    switch (i % 3) {
      case 0:
        out.push_back(exterior_derivative(GeneratorForm(space, 0, {{1.0, {random_polynomial(n, max_degree, rng)}}})));
        break;
      case 1: {
        // q(f) df is closed for any univariate q.
        SmoothMap f = random_polynomial(n, std::max(1, max_degree - 1), rng);
        const SmoothMap q = random_polynomial(1, 2, rng);
        out.push_back(GeneratorForm::lambda(space, {compose(q, f), f}));
        break;
      }
      default:
        out.push_back(random_polynomial_form(space, top, max_degree, 2, rng));
        break;
    }
  }
  return out;
}

std::vector<std::string> derham_fixture_names() { return {"circle", "cone", "interval", "plane"}; }

DeRhamFixture derham_fixture(const std::string& name, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DeRhamFixture fx;
  fx.name = name;
  if (name == "plane") {
    fx.cover = plane_cover(false);
    fx.max_degree = 2;
    const SpacePtr s = fx.cover.space;
    fx.contraction = build_contraction(s, {0.0, 0.0});
    fx.battery = closed_form_battery(s, 6, rng, 3);
    for (int p : {2, 3})
      for (int k = 0; k < 3; ++k) fx.certificate_cubes.push_back(random_affine_cube(s, p, rng, 2.0));
    for (int p : {1, 2})
      for (int k = 0; k < 3; ++k) fx.test_cubes.push_back(random_affine_cube(s, p, rng, 2.0));
  } else if (name == "cone") {
    const OrbitSpaceModel cone = z2_cone();
    fx.cover = cone_cover(cone.space, false);
    fx.max_degree = 2;
    fx.contraction = z2_cone_contraction(cone.space);
    fx.battery = closed_form_battery(cone.space, 6, rng, 2);
    for (int p : {2, 3})
      for (int k = 0; k < 3; ++k) fx.certificate_cubes.push_back(random_cone_cube(cone, p, rng, 2.0));
    for (int p : {1, 2})
      for (int k = 0; k < 3; ++k) fx.test_cubes.push_back(random_cone_cube(cone, p, rng, 2.0));
  } else if (name == "interval") {
    fx.cover = interval_cover(2);
    fx.max_degree = 1;
    const SpacePtr s = fx.cover.space;
    fx.contraction = build_contraction(s, {0.0});
    for (int i = 0; i < 4; ++i) fx.battery.push_back(random_polynomial_form(s, 1, 3, 2, rng));
    fx.certificate_cubes = {make_cube(Box::unit(2), parse_map({"0.5 + 0.3*x1 - 0.2*x2"}, 2), s),
                            make_cube(Box::unit(2), parse_map({"0.1 + 0.4*x1*x2 + 0.2*x2"}, 2), s)};
    fx.test_cubes = {make_cube(Box::unit(1), parse_map({"0.2 + 0.7*x1"}, 1), s),
                     make_cube(Box::unit(1), parse_map({"0.9 - 0.8*x1^2"}, 1), s)};
  } else if (name == "circle") {
    fx.cover = circle_cover(3);
    fx.max_degree = 1;
    const SpacePtr s = fx.cover.space;
    const SmoothMap x = SmoothMap::coordinate(2, 0), y = SmoothMap::coordinate(2, 1);
    const GeneratorForm angle = GeneratorForm::lambda(s, {x, y}) - GeneratorForm::lambda(s, {y, x});
    fx.battery = {angle, exterior_derivative(GeneratorForm(s, 0, {{1.0, {random_polynomial(2, 3, rng)}}}))};
    fx.certificate_cubes = {angle_cube(s, Box::unit(2), expr("0.3 + 2*x1 - x2", 2)),
                            angle_cube(s, Box::unit(2), expr("4*x1*x2 + x2^2", 2))};
    fx.test_cubes = {angle_cube(s, Box::unit(1), expr("0.5 + 3*x1", 1))};
    fx.period_form = angle;
    fx.cycle = CubicalChain(angle_cube(s, Box({{0.0, 2.0 * std::numbers::pi}}), SmoothMap::identity(1)));
  } else {
    throw ValidationError("unknown de Rham fixture '" + name + "'");
  }
  return fx;
}

}  // namespace diffspace::fixtures
