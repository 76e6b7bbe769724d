#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "diffspace/smooth_map.hpp"

namespace diffspace {

/// One defining condition on ambient points.
struct Constraint {
  enum class Kind { kEqualZero, kPositive, kNonNegative };
  Kind kind = Kind::kEqualZero;
  SmoothMap function;  // scalar map on the ambient space
};

/// A point belongs to S iff it satisfies every constraint of at least one
/// clause.  No clauses means all of ℝⁿ.
struct Membership {
  std::vector<std::vector<Constraint>> clauses;
  double tolerance = 1e-8;  // on |H| for equalities and on −g for ≥ 0

  bool contains(std::span<const double> x) const;
  /// Smallest clause violation; 0 inside, +∞ when a strict inequality fails.
  double residual(std::span<const double> x) const;
};

/// Points of S from a parametrization over a box plus explicit points
/// (singular points the stratified sampler must always include).
struct SamplerSpec {
  std::vector<SmoothMap> parametrizations;           // each ℝᵏ → ℝⁿ
  std::vector<std::vector<std::pair<double, double>>> ranges;  // one box per parametrization
  std::vector<Point> fixed_points;
};

using SamplerFn = std::function<std::vector<Point>(std::uint64_t seed, std::size_t count)>;

/// A differential space (S, C∞(S)) inside ℝⁿ with a generated structure.
///
/// C∞(S) is the set of compositions F(f_1, ..., f_k) of the generators with
/// smooth F; membership of an arbitrary function is not decided.
class SpaceModel {
 public:
  SpaceModel(std::string name, int ambient_dim, Membership membership, SamplerFn sampler,
             std::vector<SmoothMap> generators);

  const std::string& name() const noexcept { return name_; }
  int ambient_dim() const noexcept { return ambient_dim_; }
  const Membership& membership() const noexcept { return membership_; }
  const std::vector<SmoothMap>& generators() const noexcept { return generators_; }

  bool contains(std::span<const double> x) const { return membership_.contains(x); }
  double residual(std::span<const double> x) const { return membership_.residual(x); }

  /// Deterministic for a given seed; reentrant.
  std::vector<Point> sample(std::uint64_t seed, std::size_t count) const { return sampler_(seed, count); }

  const SamplerFn& sampler() const noexcept { return sampler_; }

 private:
  std::string name_;
  int ambient_dim_;
  Membership membership_;
  SamplerFn sampler_;
  std::vector<SmoothMap> generators_;
};

using SpacePtr = std::shared_ptr<const SpaceModel>;

/// Sampler drawing uniformly from each parametrization box (round-robin),
/// after emitting the fixed points.
SamplerFn make_sampler(SamplerSpec spec);

/// Builds a space and validates that the sampler only emits members
/// (MembershipError otherwise).  Generators must be nonempty scalar maps on ℝⁿ.
SpacePtr make_space(std::string name, int ambient_dim, Membership membership, SamplerFn sampler,
                    std::vector<SmoothMap> generators);

/// ℝⁿ with coordinate generators and a box sampler.
SpacePtr euclidean_space(int n, double sample_radius = 1.0);

/// I × S with I = [0, 1]: coordinates (t, x), generators {t} ∪ lifted ones.
SpacePtr product_with_interval(const SpacePtr& space);

/// A function on S presented by an ambient representative.
struct StructureElement {
  SmoothMap representative;  // ℝⁿ → ℝ
  SpacePtr space;

  double operator()(std::span<const double> x) const { return representative.evaluate_scalar(x); }
};

/// F(g_{i1}, ..., g_{ik}) for the selected generators.
StructureElement generated_element(const SpacePtr& space, const SmoothMap& outer,
                                   const std::vector<int>& indices);

/// F(e_1, ..., e_k) for elements of the same space.
StructureElement compose_elements(const SmoothMap& outer, const std::vector<StructureElement>& elements);

/// The constant function 1 on S.
StructureElement unit_element(const SpacePtr& space);

/// Extensional equality on S: agreement at `count` sampled points.
bool equal_on_space(const StructureElement& a, const StructureElement& b, std::uint64_t seed,
                    std::size_t count = 200, double tolerance = 1e-9);

/// Connected components of the ε-neighbourhood graph on a point set.
std::size_t sample_components(const std::vector<Point>& points, double epsilon);

}  // namespace diffspace
