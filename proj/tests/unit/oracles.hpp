#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "diffspace/smooth_map.hpp"

namespace oracle {

/// Central differences with step h, O(h²) accurate.
inline Eigen::MatrixXd fd_jacobian(const diffspace::SmoothMap& f, const std::vector<double>& x, double h = 1e-5) {
  Eigen::MatrixXd J(f.output_dim(), f.input_dim());
  for (int j = 0; j < f.input_dim(); ++j) {
    auto xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const auto fp = f.evaluate(xp), fm = f.evaluate(xm);
    for (int i = 0; i < f.output_dim(); ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h);
  }
  return J;
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

/// Periodic trapezoid rule over [0, 2π]; spectrally accurate for smooth periodic g.
inline double periodic_trapezoid(const std::function<double(double)>& g, int n = 4096) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g(2.0 * M_PI * i / n);
  return s * 2.0 * M_PI / n;
}

}  // namespace oracle
