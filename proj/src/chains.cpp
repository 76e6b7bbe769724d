#include "diffspace/chains.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

// Irrational interior fractions keep grid points off accidental symmetry lines.
constexpr double kGridFractions[] = {0.0, 0.3183098861837907, 0.5, 0.7071067811865476, 1.0};

std::vector<double> signature(const SingularCube& c) {
  std::vector<double> sig;
  for (const auto& p : comparison_grid(c.box)) {
    const Point v = c(p);
    sig.insert(sig.end(), v.begin(), v.end());
  }
  return sig;
}

bool close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

// ℝ^{p-1} → ℝ^p inserting `value` at position axis (0-based).
SmoothMap insertion(int p, int axis, double value) {
  std::vector<NodePtr> comps;
  for (int j = 0, k = 0; j < p; ++j) comps.push_back(j == axis ? make_constant(value) : make_variable(k++));
  return SmoothMap(p - 1, std::move(comps));
}

}  // namespace

Box::Box(std::vector<std::pair<double, double>> b) : bounds(std::move(b)) {
  for (const auto& [lo, hi] : bounds)
    if (!(lo <= hi)) throw DimensionError("box bounds must satisfy lo <= hi");
}

Box Box::unit(int p) { return Box(std::vector<std::pair<double, double>>(static_cast<std::size_t>(p), {0.0, 1.0})); }

Box Box::drop_axis(int i) const {
  Box out = *this;
  out.bounds.erase(out.bounds.begin() + i);
  return out;
}

std::vector<Point> comparison_grid(const Box& box) {
  const std::size_t p = box.bounds.size();
  const std::size_t m = std::size(kGridFractions);
  std::size_t total = 1;
  for (std::size_t i = 0; i < p; ++i) total *= m;
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Point t(p);
    std::size_t rest = idx;
    for (std::size_t i = 0; i < p; ++i) {
      const auto& [lo, hi] = box.bounds[i];
      t[i] = lo + kGridFractions[rest % m] * (hi - lo);
      rest /= m;
    }
    out.push_back(std::move(t));
  }
  return out;
}

SingularCube make_cube(Box box, SmoothMap representative, SpacePtr space) {
  if (!space) throw DimensionError("cube without a space");
  if (representative.input_dim() != box.dim())
    throw DimensionError("cube representative reads " + std::to_string(representative.input_dim()) +
                         " inputs but the box has dimension " + std::to_string(box.dim()));
  if (representative.output_dim() != space->ambient_dim())
    throw DimensionError("cube representative lands in R^" + std::to_string(representative.output_dim()) +
                         " but " + space->name() + " lives in R^" + std::to_string(space->ambient_dim()));
  SingularCube c{std::move(box), std::move(representative), std::move(space)};
  for (const auto& t : comparison_grid(c.box))
    if (!c.space->contains(c(t)))
      throw MembershipError("cube " + c.representative.to_string() + " leaves " + c.space->name());
  return c;
}

SingularCube identity_cube(const SpacePtr& euclidean, int p) {
  return make_cube(Box::unit(p), SmoothMap::identity(p), euclidean);
}

bool same_cube(const SingularCube& a, const SingularCube& b, double tolerance) {
  return a.box == b.box && a.representative.output_dim() == b.representative.output_dim() &&
         close(signature(a), signature(b), tolerance);
}

CubicalChain::CubicalChain(const SingularCube& cube, long coefficient) { add(coefficient, cube); }

void CubicalChain::insert(long coefficient, const SingularCube& cube, std::vector<double> sig) {
  if (coefficient == 0) return;
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    if (terms_[j].cube.box == cube.box && close(signatures_[j], sig, 1e-12)) {
      terms_[j].coefficient += coefficient;
      if (terms_[j].coefficient == 0) {
        terms_.erase(terms_.begin() + static_cast<std::ptrdiff_t>(j));
        signatures_.erase(signatures_.begin() + static_cast<std::ptrdiff_t>(j));
      }
      return;
    }
  }
  terms_.push_back({coefficient, cube});
  signatures_.push_back(std::move(sig));
}

void CubicalChain::sort() {
  std::vector<std::size_t> order(terms_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Box& ba = terms_[a].cube.box;
    const Box& bb = terms_[b].cube.box;
    if (ba.dim() != bb.dim()) return ba.dim() < bb.dim();
    if (ba.bounds != bb.bounds) return ba.bounds < bb.bounds;
    return signatures_[a] < signatures_[b];
  });
  std::vector<Term> t;
  std::vector<std::vector<double>> s;
  for (std::size_t i : order) {
    t.push_back(std::move(terms_[i]));
    s.push_back(std::move(signatures_[i]));
  }
  terms_ = std::move(t);
  signatures_ = std::move(s);
}

void CubicalChain::add(long coefficient, const SingularCube& cube) {
  insert(coefficient, cube, signature(cube));
  sort();
}

CubicalChain& CubicalChain::operator+=(const CubicalChain& other) {
  for (std::size_t i = 0; i < other.terms_.size(); ++i)
    insert(other.terms_[i].coefficient, other.terms_[i].cube, other.signatures_[i]);
  sort();
  return *this;
}

CubicalChain& CubicalChain::operator-=(const CubicalChain& other) {
  for (std::size_t i = 0; i < other.terms_.size(); ++i)
    insert(-other.terms_[i].coefficient, other.terms_[i].cube, other.signatures_[i]);
  sort();
  return *this;
}

CubicalChain operator*(long k, const CubicalChain& c) {
  CubicalChain out;
  if (k == 0) return out;
  out = c;
  for (auto& t : out.terms_) t.coefficient *= k;
  return out;
}

std::string CubicalChain::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (const auto& t : terms_) {
    os << (t.coefficient < 0 ? " - " : " + ") << std::labs(t.coefficient) << "*[";
    for (std::size_t i = 0; i < t.cube.box.bounds.size(); ++i)
      os << (i ? "x" : "") << "[" << t.cube.box.bounds[i].first << "," << t.cube.box.bounds[i].second << "]";
    os << " " << t.cube.representative.to_string() << "]";
  }
  return os.str();
}

SingularCube face(const SingularCube& sigma, int axis, bool upper) {
  const int p = sigma.dim();
  if (p == 0) throw DimensionError("a 0-cube has no faces");
  if (axis < 1 || axis > p)
    throw DimensionError("face axis " + std::to_string(axis) + " out of range 1.." + std::to_string(p));
  const auto& [lo, hi] = sigma.box.bounds[static_cast<std::size_t>(axis - 1)];
  return {sigma.box.drop_axis(axis - 1), compose(sigma.representative, insertion(p, axis - 1, upper ? hi : lo)),
          sigma.space};
}

CubicalChain boundary(const SingularCube& sigma) {
  const int p = sigma.dim();
  if (p == 0) throw DimensionError("boundary of a 0-cube");
  CubicalChain out;
  for (int i = 1; i <= p; ++i) {
    const long sign = (i % 2 == 1) ? 1 : -1;
    out += CubicalChain(face(sigma, i, true), sign);
    out += CubicalChain(face(sigma, i, false), -sign);
  }
  return out;
}

CubicalChain boundary(const CubicalChain& chain) {
  CubicalChain out;
  for (const auto& t : chain.terms()) out += t.coefficient * boundary(t.cube);
  return out;
}

SingularCube prism(const SingularCube& sigma) {
  const int p = sigma.dim();
  Box box = sigma.box;
  box.bounds.insert(box.bounds.begin(), {0.0, 1.0});
  SmoothMap rep = stack({SmoothMap::coordinate(p + 1, 0), lift_over_interval(sigma.representative)});
  return {std::move(box), std::move(rep), product_with_interval(sigma.space)};
}

CubicalChain prism(const CubicalChain& chain) {
  CubicalChain out;
  for (const auto& t : chain.terms()) out += CubicalChain(prism(t.cube), t.coefficient);
  return out;
}

SingularCube endpoint_inclusion(int i, const SingularCube& sigma) {
  if (i != 0 && i != 1) throw DimensionError("endpoint inclusion index must be 0 or 1");
  SmoothMap rep = stack({SmoothMap::constant_scalar(sigma.dim(), static_cast<double>(i)), sigma.representative});
  return {sigma.box, std::move(rep), product_with_interval(sigma.space)};
}

CubicalChain endpoint_inclusion(int i, const CubicalChain& chain) {
  CubicalChain out;
  for (const auto& t : chain.terms()) out += CubicalChain(endpoint_inclusion(i, t.cube), t.coefficient);
  return out;
}

HomotopyCheck chain_homotopy_check(const SingularCube& sigma) {
  HomotopyCheck r;
  const CubicalChain c(sigma);
  r.lhs = boundary(prism(c));
  if (sigma.dim() > 0) r.lhs += prism(boundary(c));
  r.rhs = endpoint_inclusion(1, c) - endpoint_inclusion(0, c);
  r.holds = (r.lhs - r.rhs).empty();
  return r;
}

}  // namespace diffspace
