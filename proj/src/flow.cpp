#include "diffspace/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

using State = std::vector<double>;
using Stepper = boost::numeric::odeint::runge_kutta_dopri5<State>;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Cubic Hermite interpolant on [t0, t0 + h].
Point hermite(const State& y0, const State& f0, const State& y1, const State& f1, double h, double s) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  Point out(y0.size());
  for (std::size_t i = 0; i < y0.size(); ++i)
    out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return out;
}

struct Side {
  std::vector<double> times;
  std::vector<Point> points;
  HalfCurve half;
};

Side integrate_side(const VectorFieldModel& X, const Point& x0, double t_end, const StepControl& c) {
  Side side;
  const SpaceModel& space = *X.space();
  if (t_end == 0.0) return side;
  const double dir = t_end > 0 ? 1.0 : -1.0;
  auto system = [&X](const State& x, State& dxdt, double) { dxdt = X.value(x); };

  Stepper stepper;
  double t = 0.0;
  State y = x0;
  State f;
  try {
    f = X.value(y);
  } catch (const EvalError&) {
    side.half = {0.0, true, ExitReason::kLeftSpace, 0};
    return side;
  }
  const bool fixed = c.fixed_step > 0.0;
  double h = dir * std::min(fixed ? c.fixed_step : c.initial_step, std::abs(t_end));
  State y1(y.size()), f1(y.size()), err(y.size());

  for (std::size_t step = 0;; ++step) {
    if (step >= c.max_steps) throw EvalError("integration exceeded " + std::to_string(c.max_steps) + " steps");
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;

    double err_norm = std::numeric_limits<double>::infinity();
    try {
      stepper.do_step(system, y, f, t, y1, f1, h, err);
      if (all_finite(y1) && all_finite(f1) && all_finite(err)) {
        err_norm = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
          const double scale = c.atol + c.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
          err_norm = std::max(err_norm, std::abs(err[i]) / scale);
        }
      }
    } catch (const EvalError&) {
    }

    if (fixed && !std::isfinite(err_norm)) {
      side.half = {t, true, ExitReason::kBlowUp, step};
      return side;
    }
    if (fixed || err_norm <= 1.0) {
      if (!space.contains(y1)) {
        double lo = t, hi = t + h;
        while (std::abs(hi - lo) > c.event_tolerance) {
          const double mid = 0.5 * (lo + hi);
          if (space.contains(hermite(y, f, y1, f1, h, (mid - t) / h)))
            lo = mid;
          else
            hi = mid;
        }
        if (lo != t) {
          side.times.push_back(lo);
          side.points.push_back(hermite(y, f, y1, f1, h, (lo - t) / h));
        }
        side.half = {hi, true, ExitReason::kLeftSpace, step + 1};
        return side;
      }
      if (inf_norm(y1) > c.state_cap) {
        side.half = {t + h, true, ExitReason::kBlowUp, step + 1};
        return side;
      }
      t = (t + h - t_end) * dir >= 0.0 ? t_end : t + h;
      std::swap(y, y1);
      std::swap(f, f1);
      side.times.push_back(t);
      side.points.push_back(y);
      if (t == t_end) {
        side.half = {t, false, ExitReason::kMaxTime, step + 1};
        return side;
      }
      if (!fixed) {
        const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
        h = dir * std::min(std::abs(h) * grow, c.max_step);
      }
    } else {
      const double shrink = std::isfinite(err_norm) ? std::max(0.1, 0.9 * std::pow(err_norm, -0.2)) : 0.1;
      h *= shrink;
      if (std::abs(h) < c.min_step) {
        side.half = {t, true, ExitReason::kBlowUp, step + 1};
        return side;
      }
    }
  }
}

double invariance_residual(const VectorFieldModel& X, const FiniteGroupAction& action,
                           const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& g : action.elements())
    for (const auto& x : samples) {
      const Point lhs = X.value(g.apply(std::span<const double>(x)));
      const Point rhs = g.apply(std::span<const double>(X.value(x)));
      for (std::size_t i = 0; i < lhs.size(); ++i)
        worst = std::max(worst, std::abs(lhs[i] - rhs[i]) / (1.0 + std::abs(rhs[i])));
    }
  return worst;
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double derivation_apply(const TangentVector& v, const StructureElement& e) {
  if (!e.space->contains(v.base)) throw MembershipError("tangent vector base point is not in " + e.space->name());
  const Eigen::VectorXd grad = e.representative.gradient(v.base);
  if (grad.size() != v.components.size()) throw DimensionError("tangent vector has wrong dimension");
  return grad.dot(v.components);
}

VectorFieldModel::VectorFieldModel(SpacePtr space, SmoothMap field, std::vector<SmoothMap> tangency_certificate,
                                   std::vector<PointValue> point_values, double tolerance)
    : space_(std::move(space)),
      field_(std::move(field)),
      certificate_(std::move(tangency_certificate)),
      point_values_(std::move(point_values)) {
  const int n = space_->ambient_dim();
  if (field_.input_dim() != n || field_.output_dim() != n)
    throw DimensionError("vector field must map R^" + std::to_string(n) + " to itself");
  for (const auto& h : certificate_)
    if (h.input_dim() != n || h.output_dim() != 1) throw DimensionError("tangency certificate must be scalar");
  for (const auto& pv : point_values_)
    if (static_cast<int>(pv.point.size()) != n || static_cast<int>(pv.value.size()) != n)
      throw DimensionError("point value has wrong dimension");
  const double r = tangency_residual(space_->sample(1, 256));
  if (r > tolerance)
    throw ValidationError("field " + field_.to_string() + " is not tangent to " + space_->name() + " (residual " +
                          std::to_string(r) + ")");
}

Point VectorFieldModel::value(std::span<const double> x) const {
  for (const auto& pv : point_values_) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - pv.point[i]));
    if (d <= pv.radius) return pv.value;
  }
  return field_.evaluate(x);
}

TangentVector VectorFieldModel::at(const Point& x) const {
  const Point v = value(x);
  return {x, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))};
}

double VectorFieldModel::tangency_residual(const std::vector<Point>& points) const {
  double worst = 0.0;
  for (const auto& x : points) {
    const TangentVector v = at(x);
    for (const auto& h : certificate_) worst = std::max(worst, std::abs(h.gradient(x).dot(v.components)));
  }
  return worst;
}

std::string to_string(ExitReason r) {
  switch (r) {
    case ExitReason::kMaxTime:
      return "max-time";
    case ExitReason::kLeftSpace:
      return "left-space";
    case ExitReason::kBlowUp:
      return "blow-up";
    case ExitReason::kCollapsedToPoint:
      return "collapsed-to-point";
  }
  return "unknown";
}

bool IntegralCurveResult::open_interval() const {
  if (collapsed()) return false;
  auto ok = [](const HalfCurve& h) { return h.open || h.reason == ExitReason::kMaxTime; };
  return ok(backward) && ok(forward) && domain_length() > 0.0;
}

IntegralCurveResult integrate_curve(const VectorFieldModel& X, const Point& x0, std::pair<double, double> t_span,
                                    const StepControl& control) {
  if (static_cast<int>(x0.size()) != X.space()->ambient_dim()) throw DimensionError("start point has wrong dimension");
  if (!X.space()->contains(x0)) throw MembershipError("start point is not in " + X.space()->name());
  if (t_span.first > 0.0 || t_span.second < 0.0) throw DimensionError("time span must contain 0");

  Side back = integrate_side(X, x0, t_span.first, control);
  Side fwd = integrate_side(X, x0, t_span.second, control);

  IntegralCurveResult out;
  out.backward = back.half;
  out.forward = fwd.half;
  for (std::size_t i = back.times.size(); i-- > 0;) {
    out.times.push_back(back.times[i]);
    out.points.push_back(back.points[i]);
  }
  out.times.push_back(0.0);
  out.points.push_back(x0);
  out.times.insert(out.times.end(), fwd.times.begin(), fwd.times.end());
  out.points.insert(out.points.end(), fwd.points.begin(), fwd.points.end());
  for (const auto& p : out.points) out.residuals.push_back(X.space()->residual(p));

  const double collapse = 10.0 * control.min_step;
  const bool two_sided = t_span.first < 0.0 && t_span.second > 0.0;
  if (two_sided && std::abs(back.half.reach) < collapse && std::abs(fwd.half.reach) < collapse) {
    out.exit_reason = ExitReason::kCollapsedToPoint;
    out.backward.reach = out.forward.reach = 0.0;
    out.times.assign(1, 0.0);
    out.points.assign(1, x0);
    out.residuals.assign(1, X.space()->residual(x0));
  } else if (t_span.second > 0.0 && fwd.half.reason != ExitReason::kMaxTime) {
    out.exit_reason = fwd.half.reason;
  } else if (t_span.first < 0.0) {
    out.exit_reason = back.half.reason;
  } else {
    out.exit_reason = fwd.half.reason;
  }
  return out;
}

Point flow_at(const VectorFieldModel& X, const Point& x, double t, const StepControl& control) {
  const IntegralCurveResult r = integrate_curve(X, x, {std::min(t, 0.0), std::max(t, 0.0)}, control);
  const HalfCurve& side = t >= 0.0 ? r.forward : r.backward;
  if (t != 0.0 && side.reason != ExitReason::kMaxTime)
    throw EvalError("flow is not defined at t = " + std::to_string(t) + " (" + to_string(side.reason) + ")");
  return t >= 0.0 ? r.points.back() : r.points.front();
}

std::vector<ProbeRow> uniform_epsilon_probe(const VectorFieldModel& X, const Point& center,
                                            const std::vector<double>& radii, const ProbeOptions& options) {
  const SpaceModel& space = *X.space();
  if (!space.contains(center)) throw MembershipError("probe center is not in " + space.name());
  const std::size_t n = center.size();

  LocalSampler sampler = options.local_sampler;
  if (!sampler) {
    sampler = [&space, &options, n](const Point& c, double r) {
      std::mt19937_64 rng(options.seed ^ std::hash<double>{}(r));
      std::normal_distribution<double> normal;
      std::uniform_real_distribution<double> unit;
      std::vector<Point> pts;
      for (std::size_t attempt = 0; attempt < 50 * options.samples_per_radius && pts.size() < options.samples_per_radius;
           ++attempt) {
        Point dir(n);
        double norm = 0.0;
        for (auto& d : dir) {
          d = normal(rng);
          norm += d * d;
        }
        norm = std::sqrt(norm);
        const double scale = r * std::pow(unit(rng), 1.0 / static_cast<double>(n)) / norm;
        Point p = c;
        for (std::size_t i = 0; i < n; ++i) p[i] += scale * dir[i];
        if (space.contains(p)) pts.push_back(std::move(p));
      }
      return pts;
    };
  }

  std::vector<ProbeRow> rows;
  for (double r : radii) {
    std::vector<Point> pts;
    for (auto& p : sampler(center, r)) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d2 += (p[i] - center[i]) * (p[i] - center[i]);
      if (std::sqrt(d2) <= r * (1.0 + 1e-12) && space.contains(p)) pts.push_back(std::move(p));
      if (pts.size() >= options.samples_per_radius) break;
    }
    std::vector<double> lengths(pts.size());
    std::vector<char> open(pts.size());
    parallel_for(pts.size(), options.workers, [&](std::size_t i) {
      const IntegralCurveResult c = integrate_curve(X, pts[i], {-options.span_cap, options.span_cap}, options.control);
      lengths[i] = c.domain_length();
      open[i] = c.open_interval() ? 1 : 0;
    });
    ProbeRow row;
    row.radius = r;
    row.samples = pts.size();
    row.min_domain_length = lengths.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : *std::min_element(lengths.begin(), lengths.end());
    row.open_domains = static_cast<std::size_t>(std::count(open.begin(), open.end(), 1));
    rows.push_back(row);
  }
  return rows;
}

CommutationReport flow_commutation_check(const VectorFieldModel& X, const FiniteGroupAction& action,
                                         const std::vector<double>& t_samples, const std::vector<Point>& x_samples,
                                         const StepControl& control, double invariance_tol) {
  if (action.ambient_dim() != X.space()->ambient_dim()) throw DimensionError("action and field dimensions differ");
  CommutationReport report;
  report.invariance_residual = invariance_residual(X, action, x_samples);
  report.invariant = report.invariance_residual <= invariance_tol;
  if (!report.invariant) return report;
  double worst = 0.0;
  for (const auto& g : action.elements())
    for (double t : t_samples)
      for (const auto& x : x_samples) {
        const Point a = g.apply(std::span<const double>(flow_at(X, x, t, control)));
        const Point b = flow_at(X, g.apply(std::span<const double>(x)), t, control);
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
      }
  report.max_residual = worst;
  return report;
}

double pushforward_check(const VectorFieldModel& X, const FiniteGroupAction& action, const HilbertMap& hilbert,
                         const SmoothMap& induced_field, const std::vector<double>& t_samples,
                         const std::vector<Point>& x_samples, const StepControl& control, double check_tol) {
  const SmoothMap& pi = hilbert.components;
  const int k = pi.output_dim();
  if (pi.input_dim() != X.space()->ambient_dim()) throw DimensionError("Hilbert map reads the wrong dimension");
  if (induced_field.input_dim() != k || induced_field.output_dim() != k)
    throw DimensionError("induced field must act on the image coordinates");

  const double inv = invariance_residual(X, action, x_samples);
  if (inv > check_tol) throw ValidationError("vector field is not invariant (residual " + std::to_string(inv) + ")");
  for (const auto& g : action.elements())
    for (const auto& x : x_samples) {
      const Point a = pi.evaluate(g.apply(std::span<const double>(x)));
      const Point b = pi.evaluate(x);
      for (int i = 0; i < k; ++i)
        if (std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) >
            check_tol * (1.0 + std::abs(b[static_cast<std::size_t>(i)])))
          throw ValidationError("Hilbert component " + std::to_string(i) + " is not invariant");
    }
  for (const auto& x : x_samples) {
    const Jet j = pi.jet(x);
    const Point v = X.value(x);
    const Eigen::VectorXd lhs = j.jacobian * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    const Point rhs = induced_field.evaluate(std::vector<double>(j.value.data(), j.value.data() + k));
    for (int i = 0; i < k; ++i)
      if (std::abs(lhs(i) - rhs[static_cast<std::size_t>(i)]) > check_tol * (1.0 + std::abs(lhs(i))))
        throw ValidationError("induced field is not pi-related to the field");
  }

  const VectorFieldModel image(euclidean_space(k), induced_field);
  double worst = 0.0;
  for (double t : t_samples)
    for (const auto& x : x_samples) {
      const Point a = pi.evaluate(flow_at(X, x, t, control));
      const Point b = flow_at(image, pi.evaluate(x), t, control);
      for (int i = 0; i < k; ++i)
        worst = std::max(worst, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
    }
  return worst;
}

}  // namespace diffspace
