#include "diffspace/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

GaussLegendre compute_rule(int n) {
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    auto lo = static_cast<std::size_t>(i);
    auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1) throw Error("quadrature order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_rule(order));
  return *slot;
}

GaussLegendre gauss_legendre_on(int order, double a, double b) {
  GaussLegendre out = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    out.nodes[i] = mid + half * out.nodes[i];
    out.weights[i] *= half;
  }
  return out;
}

std::size_t QuadratureRule::node_count(std::size_t dimension) const {
  std::size_t per_axis = static_cast<std::size_t>(order) * static_cast<std::size_t>(panels);
  std::size_t total = 1;
  for (std::size_t i = 0; i < dimension; ++i) total *= per_axis;
  return total;
}

void QuadratureRule::for_each_node(
    std::span<const std::pair<double, double>> box,
    const std::function<void(std::span<const double>, double)>& visit) const {
  if (panels < 1) throw Error("quadrature panel count must be positive");
  const std::size_t dim = box.size();
  if (dim == 0) {
    visit(std::span<const double>(), 1.0);
    return;
  }
  // Per-axis composite nodes.
  std::vector<std::vector<double>> axis_nodes(dim);
  std::vector<std::vector<double>> axis_weights(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double lo = box[a].first;
    const double width = (box[a].second - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      GaussLegendre r = gauss_legendre_on(order, lo + p * width, lo + (p + 1) * width);
      axis_nodes[a].insert(axis_nodes[a].end(), r.nodes.begin(), r.nodes.end());
      axis_weights[a].insert(axis_weights[a].end(), r.weights.begin(), r.weights.end());
    }
  }
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> point(dim);
  const std::size_t per_axis = axis_nodes[0].size();
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      point[a] = axis_nodes[a][idx[a]];
      w *= axis_weights[a][idx[a]];
    }
    visit(point, w);
    std::size_t a = 0;
    while (a < dim) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
      ++a;
    }
    if (a == dim) break;
  }
}

}  // namespace diffspace
