#include "diffspace/diff_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <map>
#include <mutex>
#include <random>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

double violation(const Constraint& c, std::span<const double> x) {
  const double v = c.function.evaluate_scalar(x);
  switch (c.kind) {
    case Constraint::Kind::kEqualZero:
      return std::abs(v);
    case Constraint::Kind::kPositive:
      return v > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    case Constraint::Kind::kNonNegative:
      return v >= 0.0 ? 0.0 : -v;
  }
  return std::numeric_limits<double>::infinity();
}

std::string describe(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

}  // namespace

static SpacePtr build_interval_product(const SpacePtr& space);

double Membership::residual(std::span<const double> x) const {
  if (clauses.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& clause : clauses) {
    double worst = 0.0;
    for (const auto& c : clause) {
      double v;
      try {
        v = violation(c, x);
      } catch (const EvalError&) {
        v = std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, v);
      if (!(worst < best)) break;
    }
    best = std::min(best, worst);
  }
  return best;
}

bool Membership::contains(std::span<const double> x) const { return residual(x) <= tolerance; }

SpaceModel::SpaceModel(std::string name, int ambient_dim, Membership membership, SamplerFn sampler,
                       std::vector<SmoothMap> generators)
    : name_(std::move(name)),
      ambient_dim_(ambient_dim),
      membership_(std::move(membership)),
      sampler_(std::move(sampler)),
      generators_(std::move(generators)) {}

SamplerFn make_sampler(SamplerSpec spec) {
  if (spec.parametrizations.size() != spec.ranges.size())
    throw DimensionError("sampler needs one parameter box per parametrization");
  for (std::size_t i = 0; i < spec.parametrizations.size(); ++i)
    if (spec.parametrizations[i].input_dim() != static_cast<int>(spec.ranges[i].size()))
      throw DimensionError("parameter box dimension does not match parametrization");
  return [spec = std::move(spec)](std::uint64_t seed, std::size_t count) {
    std::vector<Point> out;
    out.reserve(count);
    for (const auto& p : spec.fixed_points) {
      if (out.size() >= count) return out;
      out.push_back(p);
    }
    if (spec.parametrizations.empty()) return out;
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL);
    std::size_t which = 0;
    while (out.size() < count) {
      const auto& map = spec.parametrizations[which];
      const auto& box = spec.ranges[which];
      Point u(box.size());
      for (std::size_t k = 0; k < box.size(); ++k) {
        std::uniform_real_distribution<double> d(box[k].first, box[k].second);
        u[k] = d(rng);
      }
      out.push_back(map.evaluate(u));
      which = (which + 1) % spec.parametrizations.size();
    }
    return out;
  };
}

SpacePtr make_space(std::string name, int ambient_dim, Membership membership, SamplerFn sampler,
                    std::vector<SmoothMap> generators) {
  if (ambient_dim < 0) throw DimensionError("negative ambient dimension");
  if (generators.empty()) throw ValidationError("space '" + name + "' needs at least one generator");
  for (const auto& g : generators)
    if (g.input_dim() != ambient_dim || g.output_dim() != 1)
      throw DimensionError("generator " + g.to_string() + " is not a function on R^" +
                           std::to_string(ambient_dim));
  for (const auto& clause : membership.clauses)
    for (const auto& c : clause)
      if (c.function.input_dim() != ambient_dim || c.function.output_dim() != 1)
        throw DimensionError("membership condition is not a function on R^" + std::to_string(ambient_dim));
  auto space = std::make_shared<const SpaceModel>(std::move(name), ambient_dim, std::move(membership),
                                                  std::move(sampler), std::move(generators));
  for (const auto& p : space->sample(0, 64)) {
    if (static_cast<int>(p.size()) != ambient_dim)
      throw DimensionError("sampler of '" + space->name() + "' emitted a point of wrong dimension");
    if (!space->contains(p))
      throw MembershipError("sampler of '" + space->name() + "' emitted " + describe(p) +
                            " which is not in the space (residual " + std::to_string(space->residual(p)) + ")");
  }
  return space;
}

SpacePtr euclidean_space(int n, double sample_radius) {
  std::vector<SmoothMap> gens;
  for (int i = 0; i < n; ++i) gens.push_back(SmoothMap::coordinate(n, i));
  SamplerSpec spec;
  spec.parametrizations.push_back(SmoothMap::identity(n));
  spec.ranges.push_back(std::vector<std::pair<double, double>>(static_cast<std::size_t>(n),
                                                               {-sample_radius, sample_radius}));
  return make_space("R" + std::to_string(n), n, Membership{}, make_sampler(std::move(spec)), std::move(gens));
}

SpacePtr product_with_interval(const SpacePtr& space) {
  // One product per base space, so forms and cubes built separately agree on it.
  static std::mutex mutex;
  static std::map<const SpaceModel*, std::weak_ptr<const SpaceModel>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(space.get()); it != cache.end())
    if (auto hit = it->second.lock()) return hit;
  SpacePtr product = build_interval_product(space);
  cache[space.get()] = product;
  return product;
}

static SpacePtr build_interval_product(const SpacePtr& space) {
  const int n = space->ambient_dim();
  const SmoothMap t = SmoothMap::coordinate(n + 1, 0);
  std::vector<Constraint> interval{{Constraint::Kind::kNonNegative, t},
                                   {Constraint::Kind::kNonNegative, SmoothMap::constant_scalar(n + 1, 1.0) - t}};
  Membership m;
  m.tolerance = space->membership().tolerance;
  if (space->membership().clauses.empty()) {
    m.clauses.push_back(interval);
  } else {
    for (const auto& clause : space->membership().clauses) {
      std::vector<Constraint> lifted = interval;
      for (const auto& c : clause) lifted.push_back({c.kind, lift_over_interval(c.function)});
      m.clauses.push_back(std::move(lifted));
    }
  }
  std::vector<SmoothMap> gens{t};
  for (const auto& g : space->generators()) gens.push_back(lift_over_interval(g));
  SpacePtr base = space;
  SamplerFn sampler = [base](std::uint64_t seed, std::size_t count) {
    std::vector<Point> pts = base->sample(seed, count);
    std::mt19937_64 rng(seed ^ 0xA0761D6478BD642FULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
      Point q{unit(rng)};
      q.insert(q.end(), p.begin(), p.end());
      out.push_back(std::move(q));
    }
    return out;
  };
  return make_space("I x " + space->name(), n + 1, std::move(m), std::move(sampler), std::move(gens));
}

StructureElement generated_element(const SpacePtr& space, const SmoothMap& outer,
                                   const std::vector<int>& indices) {
  if (outer.output_dim() != 1) throw DimensionError("outer function must be scalar");
  if (outer.input_dim() != static_cast<int>(indices.size()))
    throw DimensionError("outer function reads " + std::to_string(outer.input_dim()) + " arguments but " +
                         std::to_string(indices.size()) + " generators were selected");
  std::vector<SmoothMap> selected;
  for (int i : indices) {
    if (i < 0 || i >= static_cast<int>(space->generators().size()))
      throw DimensionError("generator index out of range");
    selected.push_back(space->generators()[static_cast<std::size_t>(i)]);
  }
  if (selected.empty()) {
    return {SmoothMap::constant_scalar(space->ambient_dim(), outer.evaluate_scalar(std::span<const double>())),
            space};
  }
  return {compose(outer, stack(selected)), space};
}

StructureElement compose_elements(const SmoothMap& outer, const std::vector<StructureElement>& elements) {
  if (elements.empty()) throw DimensionError("composition of no elements");
  std::vector<SmoothMap> reps;
  for (const auto& e : elements) {
    if (e.space != elements.front().space) throw DimensionError("elements live on different spaces");
    reps.push_back(e.representative);
  }
  return {compose(outer, stack(reps)), elements.front().space};
}

StructureElement unit_element(const SpacePtr& space) {
  return {SmoothMap::constant_scalar(space->ambient_dim(), 1.0), space};
}

bool equal_on_space(const StructureElement& a, const StructureElement& b, std::uint64_t seed,
                    std::size_t count, double tolerance) {
  for (const auto& p : a.space->sample(seed, count))
    if (std::abs(a(p) - b(p)) > tolerance) return false;
  return true;
}

std::size_t sample_components(const std::vector<Point>& points, double epsilon) {
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) d2 += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      if (d2 <= epsilon * epsilon) parent[find(i)] = find(j);
    }
  std::size_t components = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) == i) ++components;
  return components;
}

}  // namespace diffspace
