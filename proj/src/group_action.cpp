#include "diffspace/group_action.hpp"

#include <algorithm>
#include <limits>

#include "diffspace/error.hpp"

namespace diffspace {

RationalMatrix::RationalMatrix(int dim, std::vector<Rational> entries) : dim_(dim), entries_(std::move(entries)) {
  if (dim_ <= 0 || entries_.size() != static_cast<std::size_t>(dim_ * dim_))
    throw DimensionError("rational matrix needs dim*dim entries");
}

RationalMatrix RationalMatrix::identity(int dim) {
  std::vector<Rational> e(static_cast<std::size_t>(dim * dim), Rational(0));
  for (int i = 0; i < dim; ++i) e[static_cast<std::size_t>(i * dim + i)] = 1;
  return RationalMatrix(dim, std::move(e));
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& other) const {
  if (dim_ != other.dim_) throw DimensionError("matrix product of different sizes");
  std::vector<Rational> e(entries_.size(), Rational(0));
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) {
      Rational acc = 0;
      for (int k = 0; k < dim_; ++k) acc += (*this)(r, k) * other(k, c);
      e[static_cast<std::size_t>(r * dim_ + c)] = acc;
    }
  return RationalMatrix(dim_, std::move(e));
}

Rational RationalMatrix::determinant() const {
  std::vector<Rational> a = entries_;
  const auto n = static_cast<std::size_t>(dim_);
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot * n + col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[col * n + k]);
      det = -det;
    }
    det *= a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      Rational f = a[r * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
    }
  }
  return det;
}

Point RationalMatrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DimensionError("group element applied to wrong dimension");
  Point out(x.size(), 0.0);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out[static_cast<std::size_t>(r)] += (*this)(r, c).convert_to<double>() * x[static_cast<std::size_t>(c)];
  return out;
}

std::vector<Rational> RationalMatrix::apply(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DimensionError("group element applied to wrong dimension");
  std::vector<Rational> out(x.size(), Rational(0));
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) out[static_cast<std::size_t>(r)] += (*this)(r, c) * x[static_cast<std::size_t>(c)];
  return out;
}

SmoothMap RationalMatrix::as_map() const {
  std::vector<std::vector<Fraction>> m(static_cast<std::size_t>(dim_));
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) {
      const Rational& q = (*this)(r, c);
      const auto num = boost::multiprecision::numerator(q);
      const auto den = boost::multiprecision::denominator(q);
      if (boost::multiprecision::abs(num) > std::numeric_limits<std::int64_t>::max() ||
          den > std::numeric_limits<std::int64_t>::max())
        throw DimensionError("matrix entry does not fit a 64-bit fraction");
      m[static_cast<std::size_t>(r)].push_back({num.convert_to<std::int64_t>(), den.convert_to<std::int64_t>()});
    }
  return SmoothMap::linear(m);
}

FiniteGroupAction::FiniteGroupAction(std::vector<RationalMatrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ValidationError("a group action needs at least the identity");
  dim_ = elements_.front().dim();
  for (const auto& g : elements_) {
    if (g.dim() != dim_) throw DimensionError("group elements of different sizes");
    if (g.determinant() == 0) throw ValidationError("group element is not invertible");
  }
  const RationalMatrix id = RationalMatrix::identity(dim_);
  if (std::find(elements_.begin(), elements_.end(), id) == elements_.end())
    throw ValidationError("group elements do not contain the identity");
  for (const auto& a : elements_)
    for (const auto& b : elements_)
      if (std::find(elements_.begin(), elements_.end(), a * b) == elements_.end())
        throw ValidationError("group elements are not closed under multiplication");
}

FiniteGroupAction FiniteGroupAction::generated_by(std::vector<RationalMatrix> generators, std::size_t max_order) {
  if (generators.empty()) throw ValidationError("no generators");
  std::vector<RationalMatrix> elems{RationalMatrix::identity(generators.front().dim())};
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& g : generators) {
      RationalMatrix p = elems[i] * g;
      if (std::find(elems.begin(), elems.end(), p) == elems.end()) {
        elems.push_back(std::move(p));
        if (elems.size() > max_order) throw ValidationError("generated group exceeds the order limit (not finite?)");
      }
    }
  }
  return FiniteGroupAction(std::move(elems));
}

}  // namespace diffspace
