#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diffspace/diff_space.hpp"
#include "diffspace/group_action.hpp"

namespace diffspace {

/// A derivation at a point of S, given by ambient components.
struct TangentVector {
  Point base;
  Eigen::VectorXd components;
};

/// v(e) = ∇e(base)·v.  Throws MembershipError when base ∉ S.
double derivation_apply(const TangentVector& v, const StructureElement& e);

/// Prescribed field value at an isolated point, overriding the ambient
/// representative within `radius` of `point`.
struct PointValue {
  Point point;
  Point value;
  double radius = 1e-14;
};

/// An ambient field tangent to S.  Construction checks |∇H·X| on samples of
/// S for every certificate H.
class VectorFieldModel {
 public:
  VectorFieldModel(SpacePtr space, SmoothMap field, std::vector<SmoothMap> tangency_certificate = {},
                   std::vector<PointValue> point_values = {}, double tolerance = 1e-8);

  const SpacePtr& space() const noexcept { return space_; }
  const SmoothMap& field() const noexcept { return field_; }
  const std::vector<SmoothMap>& tangency_certificate() const noexcept { return certificate_; }
  const std::vector<PointValue>& point_values() const noexcept { return point_values_; }

  Point value(std::span<const double> x) const;
  TangentVector at(const Point& x) const;

  /// Largest |∇H(x)·X(x)| over certificates and the given points.
  double tangency_residual(const std::vector<Point>& points) const;

 private:
  SpacePtr space_;
  SmoothMap field_;
  std::vector<SmoothMap> certificate_;
  std::vector<PointValue> point_values_;
};

struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-10;
  double max_step = 0.25;
  double state_cap = 1e8;
  double event_tolerance = 1e-10;  // bisection width in time
  std::size_t max_steps = 1000000;
  double fixed_step = 0.0;         // > 0 disables error control
};

enum class ExitReason { kMaxTime, kLeftSpace, kBlowUp, kCollapsedToPoint };

std::string to_string(ExitReason r);

/// One side of a maximal integral curve.
struct HalfCurve {
  double reach = 0.0;     // signed time where integration stopped
  bool open = false;      // reach itself is not in the domain
  ExitReason reason = ExitReason::kMaxTime;
  std::size_t steps = 0;
};

struct IntegralCurveResult {
  std::vector<double> times;       // increasing
  std::vector<Point> points;
  std::vector<double> residuals;   // membership residual at each point
  HalfCurve backward;
  HalfCurve forward;
  ExitReason exit_reason = ExitReason::kMaxTime;

  double domain_min() const { return backward.reach; }
  double domain_max() const { return forward.reach; }
  double domain_length() const { return forward.reach - backward.reach; }
  bool collapsed() const { return exit_reason == ExitReason::kCollapsedToPoint; }
  bool open_interval() const;
};

/// Integral curve through x0 over t_span = (t_lo ≤ 0 ≤ t_hi), integrated in
/// ambient coordinates with membership monitoring.
IntegralCurveResult integrate_curve(const VectorFieldModel& X, const Point& x0, std::pair<double, double> t_span,
                                    const StepControl& control = {});

/// φ_t(x).  Throws EvalError when t is outside the computed domain.
Point flow_at(const VectorFieldModel& X, const Point& x, double t, const StepControl& control = {});

struct ProbeRow {
  double radius = 0.0;
  double min_domain_length = 0.0;
  std::size_t samples = 0;
  std::size_t open_domains = 0;  // samples whose domain is an open interval
};

using LocalSampler = std::function<std::vector<Point>(const Point& center, double radius)>;

struct ProbeOptions {
  double span_cap = 10.0;
  std::size_t samples_per_radius = 32;
  std::uint64_t seed = 0;
  StepControl control;
  LocalSampler local_sampler;  // default: members of a random ball around center
  int workers = 1;
};

std::vector<ProbeRow> uniform_epsilon_probe(const VectorFieldModel& X, const Point& center,
                                            const std::vector<double>& radii, const ProbeOptions& options = {});

struct CommutationReport {
  bool invariant = false;
  double invariance_residual = 0.0;
  double max_residual = std::numeric_limits<double>::quiet_NaN();  // NaN when not run
};

/// max |g·φ_t(m) − φ_t(g·m)| after checking X(g·x) = g·X(x) on the samples.
CommutationReport flow_commutation_check(const VectorFieldModel& X, const FiniteGroupAction& action,
                                         const std::vector<double>& t_samples, const std::vector<Point>& x_samples,
                                         const StepControl& control = {}, double invariance_tol = 1e-10);

/// max |π(φ_t(m)) − φ̄_t(π(m))| where φ̄ is the flow of the induced field on
/// image coordinates.  Throws ValidationError when X is not invariant, the
/// components are not invariant, or Tπ·X ≠ X̄∘π on the samples.
double pushforward_check(const VectorFieldModel& X, const FiniteGroupAction& action, const HilbertMap& hilbert,
                         const SmoothMap& induced_field, const std::vector<double>& t_samples,
                         const std::vector<Point>& x_samples, const StepControl& control = {},
                         double check_tol = 1e-9);

}  // namespace diffspace
