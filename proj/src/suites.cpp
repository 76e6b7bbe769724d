#include "diffspace/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "diffspace/error.hpp"
#include "diffspace/expr_parser.hpp"
#include "diffspace/fixtures.hpp"

namespace diffspace {

namespace {

using SuiteFn = std::function<SuiteResult(const SuiteOptions&, const QuadratureRule&)>;

SingularCube point_cube(const SpacePtr& space, Point x) {
  return make_cube(Box(), SmoothMap::constant(0, std::move(x)), space);
}

SingularCube random_box_identity(const SpacePtr& euclidean, std::mt19937_64& rng) {
  const int n = euclidean->ambient_dim();
  std::uniform_real_distribution<double> lo(-1.0, 0.0), len(0.3, 1.0);
  std::vector<std::pair<double, double>> b;
  for (int i = 0; i < n; ++i) {
    const double a = lo(rng);
    b.emplace_back(a, a + len(rng));
  }
  return make_cube(Box(std::move(b)), SmoothMap::identity(n), euclidean);
}

SuiteResult d_squared(const SuiteOptions& o, const QuadratureRule& rule) {
  std::mt19937_64 rng(o.seed ^ 0xd2);
  SuiteResult r;
  const SpacePtr r3 = euclidean_space(3, 1.0);
  for (int i = 0; i < o.d_squared_forms; ++i) {
    const int p = i % 2;
    const GeneratorForm alpha = random_polynomial_form(r3, p, 4, 2, rng);
    const GeneratorForm dd = exterior_derivative(exterior_derivative(alpha));
    for (int k = 0; k < 2; ++k) {
      const SingularCube c = fixtures::random_affine_cube(r3, p + 2, rng, 2.0);
      r.max_residual = std::max(r.max_residual, std::abs(lambda_eval(dd, c, rule)));
      ++r.cases;
    }
  }
  return r;
}

SuiteResult boundary_squared(const SuiteOptions& o, const QuadratureRule&) {
  std::mt19937_64 rng(o.seed ^ 0xb2);
  SuiteResult r;
  for (int p = 2; p <= 4; ++p) {
    const std::vector<SingularCube> cubes{identity_cube(euclidean_space(p, 1.0), p),
                                          fixtures::random_affine_cube(euclidean_space(3, 1.0), p, rng, 2.0)};
    for (const auto& c : cubes) {
      r.max_residual = std::max(r.max_residual, static_cast<double>(boundary(boundary(c)).size()));
      ++r.cases;
    }
  }
  r.note = "residual counts surviving terms of ∂∂σ";
  return r;
}

SuiteResult stokes(const SuiteOptions& o, const QuadratureRule& rule) {
  std::mt19937_64 rng(o.seed ^ 0x5f);
  SuiteResult r;
  for (int i = 0; i < o.stokes_forms; ++i) {
    const int n = 2 + i % 2;
    const int p = std::min(i % 3, n - 1);
    const SpacePtr rn = euclidean_space(n, 1.0);
    const GeneratorForm alpha = random_polynomial_form(rn, p, 4, 2, rng);
    const SingularCube c = (p + 1 == n && i % 4 < 2) ? random_box_identity(rn, rng)
                                                     : fixtures::random_affine_cube(rn, p + 1, rng, 2.0);
    r.max_residual = std::max(r.max_residual, stokes_residual(alpha, c, rule));
    ++r.cases;
  }
  return r;
}

SuiteResult chain_rule(const SuiteOptions& o, const QuadratureRule& rule) {
  std::mt19937_64 rng(o.seed ^ 0xc4);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  SuiteResult r;
  const SpacePtr plane = fixtures::plane();
  for (int i = 0; i < o.chain_rule_draws; ++i) {
    const SmoothMap lin = coef(rng) * SmoothMap::coordinate(2, 0) + coef(rng) * SmoothMap::coordinate(2, 1);
    const SmoothMap F = random_polynomial(2, 3, rng) + sin(lin);
    const std::vector<StructureElement> g{{random_polynomial(2, 2, rng), plane}, {random_polynomial(2, 2, rng), plane}};
    const SingularCube seg = fixtures::random_affine_cube(plane, 1, rng, 2.0);
    r.max_residual = std::max(r.max_residual, chain_rule_residual(F, g, {seg}, rule));
    ++r.cases;
  }
  return r;
}

SuiteResult homotopy_chain(const SuiteOptions& o, const QuadratureRule&) {
  std::mt19937_64 rng(o.seed ^ 0x4c);
  SuiteResult r;
  const SpacePtr plane = fixtures::plane();
  std::vector<SingularCube> cubes{point_cube(plane, {0.25, -0.5}), identity_cube(plane, 2)};
  for (int p = 0; p <= 2; ++p)
    for (int k = 0; k < 3; ++k)
      cubes.push_back(p == 0 ? point_cube(plane, {std::uniform_real_distribution<double>(-1, 1)(rng), 0.5})
                             : fixtures::random_affine_cube(plane, p, rng, 2.0));
  const SpacePtr r1 = euclidean_space(1, 1.0);
  cubes.push_back(identity_cube(r1, 1));
  for (const auto& c : cubes) {
    if (!chain_homotopy_check(c).holds) r.max_residual += 1.0;
    ++r.cases;
  }
  r.note = "residual counts cubes where K∂ + ∂K ≠ u₁ − u₀";
  return r;
}

SuiteResult homotopy_cochain(const SuiteOptions& o, const QuadratureRule& rule) {
  std::mt19937_64 rng(o.seed ^ 0x20);
  SuiteResult r;
  const SpacePtr plane = fixtures::plane();
  const SpacePtr prod = product_with_interval(plane);
  for (int i = 0; i < o.homotopy_forms; ++i) {
    const int p = 1 + i % 2;
    const GeneratorForm omega = random_polynomial_form(prod, p, 3, 2, rng);
    const GeneratorForm lhs =
        exterior_derivative(homotopy_operator(omega, plane)) + homotopy_operator(exterior_derivative(omega), plane);
    const GeneratorForm rhs = endpoint_pullback(1, omega, plane) - endpoint_pullback(0, omega, plane);
    const GeneratorForm diff = lhs - rhs;
    for (int k = 0; k < 2; ++k) {
      const SingularCube c = fixtures::random_affine_cube(plane, p, rng, 2.0);
      r.max_residual = std::max(r.max_residual, std::abs(pair(diff, c, rule)));
      ++r.cases;
    }
  }
  return r;
}

SuiteResult homotopy_cochain_0(const SuiteOptions& o, const QuadratureRule& rule) {
  std::mt19937_64 rng(o.seed ^ 0x21);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  SuiteResult r;
  const SpacePtr plane = fixtures::plane();
  const SpacePtr prod = product_with_interval(plane);
  for (int i = 0; i < o.homotopy_forms; ++i) {
    const GeneratorForm omega(prod, 0, {{1.0, {random_polynomial(3, 4, rng)}}});
    const GeneratorForm diff = homotopy_operator(exterior_derivative(omega), plane) -
                               (endpoint_pullback(1, omega, plane) - endpoint_pullback(0, omega, plane));
    for (int k = 0; k < 2; ++k) {
      r.max_residual = std::max(r.max_residual, std::abs(pair(diff, point_cube(plane, {u(rng), u(rng)}), rule)));
      ++r.cases;
    }
  }
  return r;
}

SuiteResult poincare(const SpacePtr& space, const SmoothMap& contraction,
                     const std::function<SingularCube(int, std::mt19937_64&)>& draw, const SuiteOptions& o,
                     const QuadratureRule& rule, int degree, std::uint64_t salt) {
  std::mt19937_64 rng(o.seed ^ salt);
  SuiteResult r;
  const std::vector<GeneratorForm> battery = fixtures::closed_form_battery(space, o.poincare_forms, rng, degree);
  std::map<int, std::vector<SingularCube>> cert, tests;
  for (int p : {1, 2}) {
    for (int k = 0; k < 3; ++k) cert[p].push_back(draw(p + 1, rng));
    for (int k = 0; k < o.poincare_cubes; ++k) tests[p].push_back(draw(p, rng));
  }
  for (const auto& alpha : battery) {
    const int p = alpha.degree();
    const GeneratorForm beta = poincare_antiderivative(alpha, contraction, cert[p], 1e-9, rule);
    const GeneratorForm diff = exterior_derivative(beta) - alpha;
    for (const auto& c : tests[p]) {
      r.max_residual = std::max(r.max_residual, std::abs(pair(diff, c, rule)));
      ++r.cases;
    }
  }
  return r;
}

SuiteResult poincare_plane(const SuiteOptions& o, const QuadratureRule& rule) {
  const SpacePtr plane = fixtures::plane();
  return poincare(plane, build_contraction(plane, {0.0, 0.0}),
                  [&](int p, std::mt19937_64& rng) { return fixtures::random_affine_cube(plane, p, rng, 2.0); }, o,
                  rule, 3, 0x9a);
}

SuiteResult poincare_cone(const SuiteOptions& o, const QuadratureRule& rule) {
  const OrbitSpaceModel cone = fixtures::z2_cone();
  return poincare(cone.space, fixtures::z2_cone_contraction(cone.space),
                  [&](int p, std::mt19937_64& rng) { return fixtures::random_cone_cube(cone, p, rng, 2.0); }, o, rule,
                  2, 0x9b);
}

const std::map<std::string, std::pair<SuiteFn, double>>& registry() {
  static const std::map<std::string, std::pair<SuiteFn, double>> r{
      {"boundary-squared", {boundary_squared, 0.0}},
      {"chain-rule", {chain_rule, 1e-9}},
      {"d-squared", {d_squared, 1e-12}},
      {"homotopy-chain", {homotopy_chain, 0.0}},
      {"homotopy-cochain", {homotopy_cochain, 1e-7}},
      {"homotopy-cochain-0", {homotopy_cochain_0, 1e-7}},
      {"poincare-cone", {poincare_cone, 1e-7}},
      {"poincare-plane", {poincare_plane, 1e-7}},
      {"stokes", {stokes, 1e-8}},
  };
  return r;
}

bool non_increasing(const std::vector<ProbeRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].min_domain_length > rows[i - 1].min_domain_length) return false;
  return true;
}

}  // namespace

std::vector<std::string> verify_suite_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : registry()) ids.push_back(id);
  return ids;
}

double default_tolerance(const std::string& id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw ValidationError("unknown suite '" + id + "'");
  return it->second.second;
}

SuiteResult run_suite(const std::string& id, const SuiteOptions& options) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw ValidationError("unknown suite '" + id + "'");
  const QuadratureRule rule{options.quad_order, 1};
  SuiteResult r = it->second.first(options, rule);
  r.id = id;
  r.tolerance = it->second.second;
  if (const auto t = options.tolerances.find(id); t != options.tolerances.end()) r.tolerance = t->second;
  if (options.tolerance) r.tolerance = *options.tolerance;
  r.passed = r.max_residual <= r.tolerance;
  return r;
}

std::vector<SuiteResult> run_suites(std::vector<std::string> ids, const SuiteOptions& options) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const auto& id : ids) default_tolerance(id);
  std::vector<SuiteResult> results(ids.size());
  std::vector<std::exception_ptr> errors(ids.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      try {
        results[i] = run_suite(ids[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(options.workers, 1, static_cast<int>(std::max<std::size_t>(ids.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

FlowOutcome run_flow_experiment(const FlowExperiment& e) {
  FlowOutcome out;
  out.id = e.id;
  out.curve = integrate_curve(e.field, e.start, e.span, e.control);
  for (double res : out.curve.residuals) out.max_residual = std::max(out.max_residual, res);
  out.closed_form_error = std::numeric_limits<double>::quiet_NaN();
  bool ok = out.max_residual <= e.residual_tol;
  if (e.closed_form) {
    out.closed_form_error = 0.0;
    for (std::size_t i = 0; i < out.curve.times.size(); ++i) {
      const double t = out.curve.times[i];
      const Point g = e.closed_form->evaluate(std::span<const double>(&t, 1));
      for (std::size_t k = 0; k < g.size(); ++k)
        out.closed_form_error = std::max(out.closed_form_error, std::abs(g[k] - out.curve.points[i][k]));
    }
    ok = ok && out.closed_form_error <= e.closed_form_tol;
  }
  if (e.expected_reason) ok = ok && out.curve.exit_reason == *e.expected_reason;
  out.passed = ok;
  return out;
}

ProbeOutcome run_probe_experiment(const ProbeExperiment& e) {
  ProbeOutcome out;
  out.id = e.id;
  std::vector<double> radii = e.radii;
  std::sort(radii.begin(), radii.end(), std::greater<>());
  out.rows = uniform_epsilon_probe(e.field, e.center, radii, e.options);
  out.monotone = non_increasing(out.rows);
  out.all_open = std::all_of(out.rows.begin(), out.rows.end(),
                             [](const ProbeRow& r) { return r.samples > 0 && r.open_domains == r.samples; });
  out.passed = out.monotone && out.all_open && !out.rows.empty() &&
               out.rows.back().min_domain_length < e.final_threshold;
  return out;
}

std::vector<FlowExperiment> bundled_flow_experiments() {
  const SmoothMap closed = parse_map({"1/sqrt(1 - 2*t)", "exp(2*t - 1)"}, 1, {"t"});
  FlowExperiment backward{"bump-variety", fixtures::bump_variety_field(), fixtures::bump_variety_curve(0.0),
                          {-10.0, 0.0}, fixtures::bump_variety_control(), closed, std::nullopt};
  FlowExperiment origin{"bump-variety-origin", fixtures::bump_variety_field(), {0.0, 0.0}, {-10.0, 10.0},
                        fixtures::bump_variety_control(), std::nullopt, ExitReason::kCollapsedToPoint};
  return {backward, origin};
}

std::vector<ProbeExperiment> bundled_probe_experiments(std::uint64_t seed) {
  ProbeOptions po;
  po.seed = seed;
  po.local_sampler = fixtures::disk_with_axis_sampler();
  return {ProbeExperiment{"disk-with-axis", fixtures::disk_with_axis_field(), {0.0, 0.0}, {1e-1, 1e-2, 1e-3}, po}};
}

OrbitExactChecks orbit_exact_checks(const FiniteGroupAction& G, const HilbertMap& hilbert, std::uint64_t seed,
                                    std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 20);
  std::vector<RationalPoint> pts;
  for (std::size_t i = 0; i < samples; ++i) {
    RationalPoint x;
    for (int k = 0; k < G.ambient_dim(); ++k) x.push_back(Rational(num(rng), den(rng)));
    pts.push_back(std::move(x));
  }
  OrbitExactChecks out;
  out.samples = samples;
  out.invariance = check_invariance_exact(hilbert.components, G, pts);
  out.relation = exact_relation_residual(hilbert, pts);
  return out;
}

EulerPushforward euler_pushforward(std::uint64_t seed, std::size_t points) {
  const SpacePtr plane = fixtures::plane();
  const VectorFieldModel X(plane, SmoothMap::identity(2));
  const HilbertMap hilbert = fixtures::z2_hilbert();
  const SmoothMap induced = parse_map({"2*x1", "2*x2", "2*x3"}, 3);
  const std::vector<double> ts{-1.0, -0.5, 0.5, 1.0};
  const std::vector<Point> xs = plane->sample(seed, points);
  EulerPushforward out;
  out.residual = pushforward_check(X, fixtures::z2_action(), hilbert, induced, ts, xs);
  for (double t : ts)
    for (const auto& x : xs) {
      const Point image = hilbert.components.evaluate(flow_at(X, x, t));
      const Point base = hilbert.components.evaluate(x);
      for (std::size_t k = 0; k < image.size(); ++k)
        out.scaling_residual = std::max(out.scaling_residual, std::abs(image[k] - std::exp(2.0 * t) * base[k]));
    }
  return out;
}

CoverOutcome run_cover_experiment(const CoverExperiment& e, std::uint64_t seed) {
  CoverOutcome out;
  out.id = e.id;
  out.validation = validate_cover(e.cover, seed);
  const CechComplex cx = build_complex(e.cover, e.max_degree);
  out.dims = cohomology_dims(cx);
  out.delta_squared_zero = coboundary_squares_to_zero(cx);
  out.passed = out.delta_squared_zero && (!e.expected || *e.expected == out.dims);
  return out;
}

std::vector<CoverExperiment> bundled_cover_experiments() {
  const SpacePtr cone = fixtures::z2_cone().space;
  return {
      {"circle-3", fixtures::circle_cover(3), 1, std::vector<int>{1, 1}},
      {"circle-4", fixtures::circle_cover(4), 1, std::vector<int>{1, 1}},
      {"cone", fixtures::cone_cover(cone, false), 1, std::vector<int>{1, 0}},
      {"cone-refined", fixtures::cone_cover(cone, true), 1, std::vector<int>{1, 0}},
      {"interval-2", fixtures::interval_cover(2), 1, std::vector<int>{1, 0}},
      {"interval-3", fixtures::interval_cover(3), 1, std::vector<int>{1, 0}},
      {"plane", fixtures::plane_cover(false), 2, std::vector<int>{1, 0, 0}},
      {"plane-refined", fixtures::plane_cover(true), 2, std::vector<int>{1, 0, 0}},
  };
}

}  // namespace diffspace
