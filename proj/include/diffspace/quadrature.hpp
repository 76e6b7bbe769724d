#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace diffspace {

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per order; thread-safe.
const GaussLegendre& gauss_legendre(int order);

/// Nodes/weights of the order-n rule mapped to [a, b].
GaussLegendre gauss_legendre_on(int order, double a, double b);

/// Tensor-product Gauss–Legendre rule.  Each axis of a box is split into
/// `panels` equal sub-intervals, each carrying an `order`-point rule; exact
/// for per-axis polynomial degree ≤ 2·order − 1.
struct QuadratureRule {
  int order = 12;
  int panels = 1;

  /// Calls visit(point, weight) for every tensor node of the box.
  void for_each_node(std::span<const std::pair<double, double>> box,
                     const std::function<void(std::span<const double>, double)>& visit) const;

  std::size_t node_count(std::size_t dimension) const;
};

}  // namespace diffspace
