#include "diffspace/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

const RationalMatrix& inverse_in(const FiniteGroupAction& G, const RationalMatrix& g) {
  const RationalMatrix id = RationalMatrix::identity(G.ambient_dim());
  for (const auto& h : G.elements())
    if (g * h == id) return h;
  throw ValidationError("group element without an inverse in the group");
}

// (1/|G|) Σ maps, componentwise.
SmoothMap mean(const std::vector<SmoothMap>& maps) {
  const int n = maps.front().input_dim();
  std::vector<NodePtr> out;
  for (int i = 0; i < maps.front().output_dim(); ++i) {
    NodePtr acc;
    for (const auto& m : maps)
      acc = acc ? make_binary(BinaryOp::kAdd, acc, m.component_node(i)) : m.component_node(i);
    out.push_back(make_binary(BinaryOp::kMul, make_rational_constant(1, static_cast<std::int64_t>(maps.size())), acc));
  }
  return SmoothMap(n, std::move(out));
}

RationalPoint lattice_point(std::size_t index, int n, int half_width) {
  RationalPoint p;
  const auto side = static_cast<std::size_t>(2 * half_width + 1);
  for (int i = 0; i < n; ++i) {
    p.emplace_back(static_cast<long>(index % side) - half_width);
    index /= side;
  }
  return p;
}

}  // namespace

double check_invariance(const SmoothMap& f, const FiniteGroupAction& G, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& x : samples) {
    const Point fx = f.evaluate(x);
    for (const auto& g : G.elements()) {
      const Point fgx = f.evaluate(g.apply(std::span<const double>(x)));
      for (std::size_t i = 0; i < fx.size(); ++i) worst = std::max(worst, std::abs(fgx[i] - fx[i]));
    }
  }
  return worst;
}

Rational check_invariance_exact(const SmoothMap& f, const FiniteGroupAction& G,
                                const std::vector<RationalPoint>& samples) {
  Rational worst = 0;
  for (const auto& x : samples) {
    const auto fx = f.evaluate_as<Rational>(std::span<const Rational>(x));
    for (const auto& g : G.elements()) {
      const RationalPoint gx = g.apply(std::span<const Rational>(x));
      const auto fgx = f.evaluate_as<Rational>(std::span<const Rational>(gx));
      for (std::size_t i = 0; i < fx.size(); ++i) {
        const Rational d = boost::multiprecision::abs(Rational(fgx[i] - fx[i]));
        if (d > worst) worst = d;
      }
    }
  }
  return worst;
}

SmoothMap average_invariant(const SmoothMap& f, const FiniteGroupAction& G) {
  if (f.input_dim() != G.ambient_dim()) throw DimensionError("function and action dimensions differ");
  std::vector<SmoothMap> terms;
  for (const auto& g : G.elements()) terms.push_back(compose(f, g.as_map()));
  return mean(terms);
}

SmoothMap average_vector_field(const SmoothMap& Y, const FiniteGroupAction& G) {
  if (Y.input_dim() != G.ambient_dim() || Y.output_dim() != G.ambient_dim())
    throw DimensionError("vector field and action dimensions differ");
  std::vector<SmoothMap> terms;
  for (const auto& g : G.elements()) terms.push_back(compose(inverse_in(G, g).as_map(), compose(Y, g.as_map())));
  return mean(terms);
}

Rational exact_relation_residual(const HilbertMap& hilbert, const std::vector<RationalPoint>& samples) {
  Rational worst = 0;
  for (const auto& x : samples) {
    const auto image = hilbert.components.evaluate_as<Rational>(std::span<const Rational>(x));
    for (const auto& r : hilbert.relations) {
      const Rational v = boost::multiprecision::abs(r.evaluate_as<Rational>(std::span<const Rational>(image))[0]);
      if (v > worst) worst = v;
    }
  }
  return worst;
}

HilbertResiduals hilbert_residuals(const HilbertMap& hilbert, const FiniteGroupAction& G,
                                   const std::vector<Point>& samples) {
  HilbertResiduals r;
  r.invariance = check_invariance(hilbert.components, G, samples);
  for (const auto& x : samples) {
    const Point image = hilbert.components.evaluate(x);
    for (const auto& rel : hilbert.relations) r.relation = std::max(r.relation, std::abs(rel.evaluate_scalar(image)));
    for (const auto& ineq : hilbert.inequalities) r.inequality = std::max(r.inequality, -ineq.evaluate_scalar(image));
  }
  return r;
}

OrbitSpaceModel orbit_pushforward(const SpacePtr& upstairs, const FiniteGroupAction& G, const HilbertMap& hilbert,
                                  std::uint64_t seed, std::size_t probes) {
  const int n = upstairs->ambient_dim();
  const SmoothMap& pi = hilbert.components;
  const int k = pi.output_dim();
  if (pi.input_dim() != n || G.ambient_dim() != n) throw DimensionError("Hilbert map, action and space disagree");
  for (const auto& r : hilbert.relations)
    if (r.input_dim() != k || r.output_dim() != 1) throw DimensionError("relation must be scalar on the image");
  for (const auto& g : hilbert.inequalities)
    if (g.input_dim() != k || g.output_dim() != 1) throw DimensionError("inequality must be scalar on the image");

  const std::vector<Point> samples = upstairs->sample(seed, probes);
  const HilbertResiduals res = hilbert_residuals(hilbert, G, samples);
  if (res.invariance > 1e-12) throw ValidationError("Hilbert components are not invariant");
  if (res.relation > 1e-9) throw ValidationError("relations do not vanish on the image");
  if (res.inequality > 0.0) throw ValidationError("inequalities fail on the image");

  // Orbit separation: exact on an integer lattice, approximate on samples.
  if (n <= 4) {
    const int half = 2;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= 2 * half + 1;
    std::vector<RationalPoint> lattice;
    std::vector<std::vector<Rational>> images;
    for (std::size_t i = 0; i < total; ++i) {
      lattice.push_back(lattice_point(i, n, half));
      images.push_back(pi.evaluate_as<Rational>(std::span<const Rational>(lattice.back())));
    }
    for (std::size_t a = 0; a < total; ++a)
      for (std::size_t b = a + 1; b < total; ++b) {
        if (images[a] != images[b]) continue;
        const bool same_orbit = std::any_of(G.elements().begin(), G.elements().end(), [&](const RationalMatrix& g) {
          return g.apply(std::span<const Rational>(lattice[a])) == lattice[b];
        });
        if (!same_orbit) {
          std::string pa, pb;
          for (int i = 0; i < n; ++i) {
            pa += (i ? "," : "") + lattice[a][static_cast<std::size_t>(i)].str();
            pb += (i ? "," : "") + lattice[b][static_cast<std::size_t>(i)].str();
          }
          throw ValidationError("components do not separate orbits: (" + pa + ") and (" + pb +
                                ") have equal images");
        }
      }
  }
  std::vector<Point> images;
  for (const auto& x : samples) images.push_back(pi.evaluate(x));
  for (std::size_t a = 0; a < samples.size(); ++a)
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      double d = 0.0;
      for (int i = 0; i < k; ++i) d = std::max(d, std::abs(images[a][static_cast<std::size_t>(i)] - images[b][static_cast<std::size_t>(i)]));
      if (d > 1e-12) continue;
      const bool same_orbit = std::any_of(G.elements().begin(), G.elements().end(), [&](const RationalMatrix& g) {
        const Point gx = g.apply(std::span<const double>(samples[a]));
        for (int i = 0; i < n; ++i)
          if (std::abs(gx[static_cast<std::size_t>(i)] - samples[b][static_cast<std::size_t>(i)]) > 1e-9) return false;
        return true;
      });
      if (!same_orbit) throw ValidationError("components do not separate two sampled orbits");
    }

  Membership m;
  std::vector<Constraint> clause;
  for (const auto& r : hilbert.relations) clause.push_back({Constraint::Kind::kEqualZero, r});
  for (const auto& g : hilbert.inequalities) clause.push_back({Constraint::Kind::kNonNegative, g});
  if (!clause.empty()) m.clauses.push_back(std::move(clause));
  // The origin is fixed by every linear action, so its image is the deepest stratum.
  const Point origin(static_cast<std::size_t>(n), 0.0);
  const bool has_origin = upstairs->contains(origin);
  SamplerFn sampler = [upstairs, pi, origin, has_origin](std::uint64_t s, std::size_t count) {
    std::vector<Point> out;
    if (count == 0) return out;
    if (has_origin) out.push_back(pi.evaluate(origin));
    for (const auto& x : upstairs->sample(s, count - out.size())) out.push_back(pi.evaluate(x));
    return out;
  };
  std::vector<SmoothMap> gens;
  for (int i = 0; i < k; ++i) gens.push_back(SmoothMap::coordinate(k, i));
  OrbitSpaceModel model;
  model.space = make_space(upstairs->name() + "/G", k, std::move(m), std::move(sampler), std::move(gens));
  model.upstairs = upstairs;
  model.hilbert = hilbert;
  model.group = G.elements();
  return model;
}

SmoothMap build_contraction(const SpacePtr& space, const Point& base, std::vector<int> weights, std::uint64_t seed,
                            std::size_t samples) {
  const int n = space->ambient_dim();
  if (static_cast<int>(base.size()) != n) throw DimensionError("contraction base has wrong dimension");
  if (weights.empty()) weights.assign(static_cast<std::size_t>(n), 1);
  if (static_cast<int>(weights.size()) != n) throw DimensionError("one weight per coordinate");
  if (!space->contains(base)) throw MembershipError("contraction base is not in " + space->name());
  std::vector<NodePtr> comps;
  const NodePtr t = make_variable(0);
  for (int i = 0; i < n; ++i) {
    const double b = base[static_cast<std::size_t>(i)];
    const int w = weights[static_cast<std::size_t>(i)];
    if (w < 1) throw DimensionError("contraction weights must be positive");
    NodePtr x = make_variable(i + 1);
    const NodePtr tw = w == 1 ? t : make_int_power(t, w);
    if (b == 0.0) {
      comps.push_back(make_binary(BinaryOp::kMul, tw, x));
    } else {
      const NodePtr bc = make_constant(b);
      comps.push_back(make_binary(BinaryOp::kAdd, bc, make_binary(BinaryOp::kMul, tw, make_binary(BinaryOp::kSub, x, bc))));
    }
  }
  SmoothMap h(n + 1, std::move(comps));
  for (const auto& x : space->sample(seed, samples))
    for (int step = 0; step <= 10; ++step) {
      Point tx{step / 10.0};
      tx.insert(tx.end(), x.begin(), x.end());
      if (!space->contains(h.evaluate(tx)))
        throw ValidationError(space->name() + " is not star-shaped for this contraction (t = " +
                              std::to_string(step / 10.0) + ")");
    }
  return h;
}

SingularCube circle_cube(const SpacePtr& plane, double radius) {
  if (!(radius > 0.0)) throw DimensionError("circle radius must be positive");
  const SmoothMap theta = SmoothMap::coordinate(1, 0);
  const SmoothMap r = SmoothMap::constant_scalar(1, radius);
  return make_cube(Box({{0.0, 2.0 * std::numbers::pi}}), stack({r * cos(theta), r * sin(theta)}), plane);
}

SlopeFit fit_loglog(const std::string& family, const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("slope fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  SlopeFit f;
  f.family = family;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

std::vector<std::pair<std::string, GeneratorForm>> scaling_families(const SpacePtr& plane) {
  const SmoothMap x = SmoothMap::coordinate(2, 0);
  const SmoothMap y = SmoothMap::coordinate(2, 1);
  const SmoothMap one = SmoothMap::constant_scalar(2, 1.0);
  auto L = [&](const SmoothMap& f0, const SmoothMap& f1) { return GeneratorForm::lambda(plane, {f0, f1}); };
  return {
      {"omega", L(x, y) - L(y, x)},
      {"x2_dxy", L(pow(x, 2), x * y)},
      {"y2_dxy", L(pow(y, 2), x * y)},
      {"x_dx", L(x, x)},
      {"dxy", L(one, x * y)},
      {"y_dy", L(y, y)},
      {"x3_dx", L(pow(x, 3), x)},
      {"x2y_dy", L(pow(x, 2) * y, y)},
      {"xy_dxy", L(x * y, x * y)},
      {"y2_dx", L(pow(y, 2), x)},
      {"y3_dy", L(pow(y, 3), y)},
  };
}

ScalingTable scaling_experiment(const std::vector<double>& radii, const QuadratureRule& rule) {
  if (radii.empty()) throw DimensionError("scaling experiment needs at least one radius");
  for (double r : radii)
    if (!(r > 0.0)) throw DimensionError("radius " + std::to_string(r) + " gives a degenerate cube");
  const SpacePtr plane = euclidean_space(2, 4.0);
  const auto families = scaling_families(plane);
  ScalingTable table;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const bool vanishing = f >= 3;
    std::vector<double> values;
    for (double r : radii) {
      const PairingResult p = pair_adaptive(families[f].second, circle_cube(plane, r), rule);
      table.rows.push_back({families[f].first, r, p.value, vanishing, p.order, p.panels, p.converged});
      values.push_back(p.value);
    }
    if (!vanishing && radii.size() >= 2) table.fits.push_back(fit_loglog(families[f].first, radii, values));
  }
  return table;
}

}  // namespace diffspace
