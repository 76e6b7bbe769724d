#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diffspace/cech.hpp"
#include "diffspace/flow.hpp"
#include "diffspace/forms.hpp"
#include "diffspace/orbit.hpp"

namespace diffspace {

struct SuiteOptions {
  std::uint64_t seed = 0;
  int quad_order = 12;
  std::map<std::string, double> tolerances;  // per suite id, overriding the defaults
  std::optional<double> tolerance;           // overrides every suite
  int workers = 1;
  int d_squared_forms = 20;
  int stokes_forms = 50;
  int chain_rule_draws = 100;
  int homotopy_forms = 12;
  int poincare_forms = 20;
  int poincare_cubes = 20;
};

struct SuiteResult {
  std::string id;
  std::size_t cases = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

/// Identity suites run by `verify`, in report order.
std::vector<std::string> verify_suite_ids();
double default_tolerance(const std::string& id);

/// Runs one suite.  ValidationError for an unknown id.
SuiteResult run_suite(const std::string& id, const SuiteOptions& options);

/// Runs the suites on up to options.workers threads; results sorted by id.
std::vector<SuiteResult> run_suites(std::vector<std::string> ids, const SuiteOptions& options);

// ---- flow experiments ----

struct FlowExperiment {
  std::string id;
  VectorFieldModel field;
  Point start;
  std::pair<double, double> span{-1.0, 1.0};
  StepControl control;
  std::optional<SmoothMap> closed_form;  // t ↦ γ(t), compared at every output time
  std::optional<ExitReason> expected_reason;
  double closed_form_tol = 1e-6;
  double residual_tol = 1e-8;
};

struct FlowOutcome {
  std::string id;
  IntegralCurveResult curve;
  double closed_form_error = 0.0;  // NaN without a closed form
  double max_residual = 0.0;
  bool passed = false;
};

FlowOutcome run_flow_experiment(const FlowExperiment& experiment);

struct ProbeExperiment {
  std::string id;
  VectorFieldModel field;
  Point center;
  std::vector<double> radii;
  ProbeOptions options;
  double final_threshold = 1e-3;  // min_domain_length at the last radius must fall below this
};

struct ProbeOutcome {
  std::string id;
  std::vector<ProbeRow> rows;
  bool monotone = false;
  bool all_open = false;
  bool passed = false;
};

ProbeOutcome run_probe_experiment(const ProbeExperiment& experiment);

/// The bundled flow and probe fixtures: bump-variety (backward from
/// (1, e⁻¹) over [−10, 0]), bump-variety-origin, disk-with-axis.
std::vector<FlowExperiment> bundled_flow_experiments();
std::vector<ProbeExperiment> bundled_probe_experiments(std::uint64_t seed = 0);

// ---- orbit experiments ----

struct OrbitExactChecks {
  std::size_t samples = 0;
  Rational invariance = 0;
  Rational relation = 0;
};

/// Exact invariance and relation residuals on random rational points.
OrbitExactChecks orbit_exact_checks(const FiniteGroupAction& G, const HilbertMap& hilbert, std::uint64_t seed,
                                    std::size_t samples = 1000);

struct EulerPushforward {
  double residual = 0.0;         // against the integrated induced flow
  double scaling_residual = 0.0; // against the closed form π ↦ e^{2t}π
};

/// Euler field x∂x + y∂y pushed through the ℤ₂ Hilbert map over t ∈ [−1, 1].
EulerPushforward euler_pushforward(std::uint64_t seed, std::size_t points = 16);

// ---- cohomology experiments ----

struct CoverExperiment {
  std::string id;
  Cover cover;
  int max_degree = 1;
  std::optional<std::vector<int>> expected;
};

struct CoverOutcome {
  std::string id;
  std::vector<int> dims;
  bool delta_squared_zero = false;
  CoverValidation validation;
  bool passed = false;
};

CoverOutcome run_cover_experiment(const CoverExperiment& experiment, std::uint64_t seed);

/// plane, plane-refined, circle-3, circle-4, interval-2, interval-3, cone,
/// cone-refined.
std::vector<CoverExperiment> bundled_cover_experiments();

}  // namespace diffspace
