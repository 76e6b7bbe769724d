// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include "diffspace/fixtures.hpp"
#include "diffspace/suites.hpp"

using namespace diffspace;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool passed, double seconds, const std::string& detail) {
  std::printf("[%s] criterion %d %-26s %7.2f s  %s\n", passed ? "PASS" : "FAIL", id, name.c_str(), seconds,
              detail.c_str());
  std::fflush(stdout);
  if (!passed) ++failures;
}

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

/// ∫₀^{2π} x² d(xy)/dθ dθ on the circle of radius R, by the periodic trapezoid rule.
double theta_oracle_x2_dxy(double R) {
  const int n = 4096;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    const double x = R * std::cos(t);
    s += x * x * R * R * std::cos(2.0 * t);
  }
  return s * 2.0 * std::numbers::pi / n;
}

void criterion_scaling() {
  const std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
  ScalingTable t;
  const double secs = timed([&] { t = scaling_experiment(radii); });
  double omega_rel = 0.0, x2_rel = 0.0, vanish = 0.0;
  int vanishing_families = 0;
  std::map<std::string, int> seen;
  for (const auto& r : t.rows) {
    if (r.family == "omega")
      omega_rel = std::max(omega_rel, std::abs(r.value / (2.0 * std::numbers::pi * r.radius * r.radius) - 1.0));
    if (r.family == "x2_dxy") x2_rel = std::max(x2_rel, std::abs(r.value / theta_oracle_x2_dxy(r.radius) - 1.0));
    if (r.vanishing) {
      vanish = std::max(vanish, std::abs(r.value));
      if (seen[r.family]++ == 0) ++vanishing_families;
    }
  }
  double omega_slope = NAN, x2_slope = NAN;
  for (const auto& f : t.fits) {
    if (f.family == "omega") omega_slope = f.slope;
    if (f.family == "x2_dxy") x2_slope = f.slope;
  }
  const bool ok = omega_rel < 1e-8 && std::abs(omega_slope - 2.0) <= 0.02 && x2_rel < 1e-8 &&
                  std::abs(x2_slope - 4.0) <= 0.05 && vanishing_families == 8 && vanish < 1e-9 && secs < 10.0;
  report(1, "orbit-space scaling", ok, secs,
         fmt("omega rel %.1e slope %.4f; x2 d(xy) rel %.1e slope %.4f;", omega_rel, omega_slope, x2_rel, x2_slope) +
             fmt(" %g vanishing families max %.1e (limits 1e-8, 2+-0.02, 4+-0.05, 1e-9, 10 s)", vanishing_families,
                 vanish));
}

SuiteResult suite(const std::string& id, double& seconds) {
  SuiteResult r;
  seconds += timed([&] { r = run_suite(id, SuiteOptions{}); });
  return r;
}

void criterion_stokes() {
  double secs = 0.0;
  const SuiteResult r = suite("stokes", secs);
  report(2, "Stokes duality", r.max_residual < 1e-8 && r.cases >= 50 && secs < 60.0, secs,
         fmt("%g forms, max residual %.2e (limit 1e-8, 60 s)", static_cast<double>(r.cases), r.max_residual));
}

void criterion_algebra() {
  double secs = 0.0;
  const SuiteResult dd = suite("d-squared", secs);
  const SuiteResult bb = suite("boundary-squared", secs);
  const SuiteResult cr = suite("chain-rule", secs);
  const bool ok = dd.max_residual < 1e-12 && bb.max_residual == 0.0 && cr.max_residual < 1e-9 && cr.cases >= 100;
  report(3, "algebraic identities", ok, secs,
         fmt("d^2 max %.2e; boundary^2 surviving terms %g (p = 2..4); chain rule max %.2e over %g draws", dd.max_residual,
             bb.max_residual, cr.max_residual, static_cast<double>(cr.cases)) +
             " (limits 1e-12, 0, 1e-9)");
}

void criterion_homotopy() {
  double secs = 0.0;
  const SuiteResult chain = suite("homotopy-chain", secs);
  const SuiteResult cochain = suite("homotopy-cochain", secs);
  const SuiteResult cochain0 = suite("homotopy-cochain-0", secs);
  const SuiteResult plane = suite("poincare-plane", secs);
  const SuiteResult cone = suite("poincare-cone", secs);
  const bool ok = chain.max_residual == 0.0 && cochain.max_residual < 1e-7 && cochain0.max_residual < 1e-7 &&
                  plane.max_residual < 1e-7 && cone.max_residual < 1e-7 && plane.cases >= 400 && cone.cases >= 400;
  report(4, "prism and Poincare", ok, secs,
         fmt("chain failures %g; cochain max %.2e; Poincare plane %.2e, cone %.2e", chain.max_residual,
             std::max(cochain.max_residual, cochain0.max_residual), plane.max_residual, cone.max_residual) +
             fmt(" over %g + %g pairings (limit 1e-7)", static_cast<double>(plane.cases),
                 static_cast<double>(cone.cases)));
}

void criterion_flow() {
  std::vector<FlowOutcome> flows;
  ProbeOutcome probe;
  const double secs = timed([&] {
    for (const auto& e : bundled_flow_experiments()) flows.push_back(run_flow_experiment(e));
    probe = run_probe_experiment(bundled_probe_experiments().front());
  });
  const FlowOutcome& curve = flows[0].id == "bump-variety" ? flows[0] : flows[1];
  const FlowOutcome& origin = flows[0].id == "bump-variety" ? flows[1] : flows[0];
  const bool curve_ok = curve.curve.domain_min() <= -10.0 && curve.closed_form_error < 1e-6 && curve.max_residual < 1e-8;
  const bool origin_ok = origin.curve.collapsed();
  const bool probe_ok = probe.monotone && probe.all_open && probe.rows.back().radius <= 1e-3 &&
                        probe.rows.back().min_domain_length < 1e-3;
  report(5, "integral curves", curve_ok && origin_ok && probe_ok, secs,
         fmt("closed-form error %.2e, residual %.2e on [%g, 0]; ", curve.closed_form_error, curve.max_residual,
             curve.curve.domain_min()) +
             "origin " + to_string(origin.curve.exit_reason) +
             fmt("; probe min domain %.2e at radius %g, monotone %g, all open %g", probe.rows.back().min_domain_length,
                 probe.rows.back().radius, probe.monotone, probe.all_open));
}

void criterion_orbit() {
  OrbitExactChecks exact;
  EulerPushforward push;
  const double secs = timed([&] {
    exact = orbit_exact_checks(fixtures::z2_action(), fixtures::z2_hilbert(), 0, 1000);
    push = euler_pushforward(0);
  });
  const bool ok = exact.samples == 1000 && exact.invariance == 0 && exact.relation == 0 && push.residual < 1e-6 &&
                  push.scaling_residual < 1e-6;
  report(6, "orbit map", ok, secs,
         "exact invariance " + exact.invariance.str() + ", relation " + exact.relation.str() +
             fmt(" on %g rationals; pushforward %.2e, e^{2t} scaling %.2e (limit 1e-6)",
                 static_cast<double>(exact.samples), push.residual, push.scaling_residual));
}

void criterion_cech() {
  const std::map<std::string, std::vector<int>> expected{
      {"plane", {1, 0, 0}}, {"circle-3", {1, 1}}, {"interval-2", {1, 0}}, {"cone", {1, 0}}};
  bool ok = true;
  std::string detail;
  const double secs = timed([&] {
    for (const auto& e : bundled_cover_experiments()) {
      const auto it = expected.find(e.id);
      if (it == expected.end()) continue;
      const CoverOutcome o = run_cover_experiment(e, 0);
      ok = ok && o.dims == it->second && o.delta_squared_zero;
      detail += e.id + " (";
      for (std::size_t q = 0; q < o.dims.size(); ++q) detail += (q ? "," : "") + std::to_string(o.dims[q]);
      detail += std::string(o.delta_squared_zero ? ") " : ") delta^2 != 0 ");
    }
  });
  report(7, "Cech cohomology", ok && secs < 5.0, secs, detail + "(limit 5 s)");
}

void derham_consistency() {
  bool ok = true;
  std::string detail;
  const double secs = timed([&] {
    for (const auto& name : fixtures::derham_fixture_names()) {
      const DeRhamReport r = de_rham_spotcheck(fixtures::derham_fixture(name, 0));
      ok = ok && r.consistent;
      detail += name + (r.consistent ? " consistent " : " INCONSISTENT ");
    }
  });
  std::printf("[%s] consistency %-26s %7.2f s  %s\n", ok ? "PASS" : "FAIL", "de Rham spot checks", secs, detail.c_str());
  if (!ok) ++failures;
}

}  // namespace

int main() {
  criterion_scaling();
  criterion_stokes();
  criterion_algebra();
  criterion_homotopy();
  criterion_flow();
  criterion_orbit();
  criterion_cech();
  derham_consistency();
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
