#include "diffspace/cech.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

std::string tuple_name(const Cover& cover, const std::vector<int>& t) {
  std::string s;
  for (int i : t) {
    if (!s.empty()) s += " & ";
    s += cover.regions[static_cast<std::size_t>(i)].name;
  }
  return s;
}

void for_each_subset(const std::vector<int>& set, const std::function<void(const std::vector<int>&)>& visit) {
  const std::size_t n = set.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) sub.push_back(set[i]);
    visit(sub);
  }
}

bool in_all(const Cover& cover, const std::vector<int>& tuple, std::span<const double> x) {
  if (!cover.space->contains(x)) return false;
  return std::all_of(tuple.begin(), tuple.end(),
                     [&](int i) { return cover.regions[static_cast<std::size_t>(i)].membership.contains(x); });
}

void check_contraction(const Cover& cover, const std::vector<int>& tuple, const SmoothMap& h,
                       const std::vector<Point>& points) {
  const int n = cover.space->ambient_dim();
  if (h.input_dim() != n + 1 || h.output_dim() != n)
    throw DimensionError("contraction witness for " + tuple_name(cover, tuple) + " has wrong dimensions");
  std::optional<Point> base;
  for (const auto& x : points) {
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      Point tx{t};
      tx.insert(tx.end(), x.begin(), x.end());
      const Point y = h.evaluate(tx);
      if (!in_all(cover, tuple, y))
        throw ValidationError("contraction of " + tuple_name(cover, tuple) + " leaves the intersection at t = " +
                              std::to_string(t));
      if (t == 1.0)
        for (int i = 0; i < n; ++i)
          if (std::abs(y[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) > 1e-12)
            throw ValidationError("contraction of " + tuple_name(cover, tuple) + " is not the identity at t = 1");
      if (t == 0.0) {
        if (!base) base = y;
        for (int i = 0; i < n; ++i)
          if (std::abs(y[static_cast<std::size_t>(i)] - (*base)[static_cast<std::size_t>(i)]) > 1e-12)
            throw ValidationError("contraction of " + tuple_name(cover, tuple) + " is not constant at t = 0");
      }
    }
  }
}

}  // namespace

bool Cover::declared_nonempty(const std::vector<int>& tuple) const {
  if (tuple.size() == 1) return true;
  return std::find(nonempty.begin(), nonempty.end(), tuple) != nonempty.end();
}

CoverValidation validate_cover(const Cover& cover, std::uint64_t seed, std::size_t count) {
  if (!cover.space) throw ValidationError("cover without a space");
  if (cover.regions.empty()) throw ValidationError("cover without regions");
  const int m = static_cast<int>(cover.regions.size());
  for (const auto& t : cover.nonempty) {
    if (t.size() < 2) throw ValidationError("declared intersections need at least two indices");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 0 || t[i] >= m) throw ValidationError("cover index out of range");
      if (i > 0 && t[i] <= t[i - 1]) throw ValidationError("declared intersection indices must increase");
    }
    for_each_subset(t, [&](const std::vector<int>& sub) {
      if (!cover.declared_nonempty(sub))
        throw ValidationError("intersection " + tuple_name(cover, t) + " is declared nonempty but " +
                              tuple_name(cover, sub) + " is not");
    });
  }

  CoverValidation report;
  std::map<std::vector<int>, std::vector<Point>> members;
  for (const auto& x : cover.space->sample(seed, count)) {
    ++report.samples;
    std::vector<int> inside;
    for (int i = 0; i < m; ++i)
      if (cover.regions[static_cast<std::size_t>(i)].membership.contains(x)) inside.push_back(i);
    if (inside.empty()) {
      ++report.uncovered;
      continue;
    }
    for_each_subset(inside, [&](const std::vector<int>& sub) {
      if (!cover.declared_nonempty(sub))
        throw ValidationError("sample point lies in " + tuple_name(cover, sub) + " which is declared empty");
      ++report.hits[sub];
      members[sub].push_back(x);
    });
  }
  if (report.uncovered > 0)
    throw ValidationError(std::to_string(report.uncovered) + " sample points of " + cover.space->name() +
                          " lie in no region of the cover");

  std::vector<std::vector<int>> declared = cover.nonempty;
  for (int i = 0; i < m; ++i) declared.push_back({i});
  for (const auto& t : declared) {
    const auto it = members.find(t);
    if (it == members.end())
      throw ValidationError("no sample point found in " + tuple_name(cover, t) + " which is declared nonempty");
    if (sample_components(it->second, cover.connectivity_scale) != 1)
      throw ValidationError("samples of " + tuple_name(cover, t) + " are not connected");
  }
  for (const auto& [t, h] : cover.contractions) check_contraction(cover, t, h, members[t]);
  return report;
}

RationalMatrixDense multiply(const RationalMatrixDense& a, const RationalMatrixDense& b) {
  if (a.cols != b.rows) throw DimensionError("matrix product dimension mismatch");
  RationalMatrixDense out{a.rows, b.cols, std::vector<Rational>(a.rows * b.cols, Rational(0))};
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a.at(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return out;
}

bool is_zero(const RationalMatrixDense& m) {
  return std::all_of(m.entries.begin(), m.entries.end(), [](const Rational& q) { return q == 0; });
}

std::size_t exact_rank(RationalMatrixDense m) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols && rank < m.rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < m.rows && m.at(pivot, col) == 0) ++pivot;
    if (pivot == m.rows) continue;
    for (std::size_t k = 0; k < m.cols; ++k) std::swap(m.at(pivot, k), m.at(rank, k));
    for (std::size_t r = rank + 1; r < m.rows; ++r) {
      if (m.at(r, col) == 0) continue;
      const Rational f = m.at(r, col) / m.at(rank, col);
      for (std::size_t k = col; k < m.cols; ++k) m.at(r, k) -= f * m.at(rank, k);
    }
    ++rank;
  }
  return rank;
}

CechComplex build_complex(const Cover& cover, int max_degree) {
  if (max_degree < 0) throw DimensionError("negative maximal degree");
  CechComplex cx;
  const auto m = static_cast<int>(cover.regions.size());
  cx.basis.resize(static_cast<std::size_t>(max_degree + 2));
  for (int i = 0; i < m; ++i) cx.basis[0].push_back({i});
  for (const auto& t : cover.nonempty)
    if (t.size() - 1 < cx.basis.size()) cx.basis[t.size() - 1].push_back(t);
  for (auto& b : cx.basis) std::sort(b.begin(), b.end());

  for (int q = 0; q <= max_degree; ++q) {
    const auto& src = cx.basis[static_cast<std::size_t>(q)];
    const auto& dst = cx.basis[static_cast<std::size_t>(q + 1)];
    RationalMatrixDense d{dst.size(), src.size(), std::vector<Rational>(dst.size() * src.size(), Rational(0))};
    for (std::size_t r = 0; r < dst.size(); ++r) {
      for (std::size_t j = 0; j < dst[r].size(); ++j) {
        std::vector<int> face = dst[r];
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(j));
        const auto it = std::lower_bound(src.begin(), src.end(), face);
        if (it == src.end() || *it != face)
          throw ValidationError("nerve is not closed under faces: " + tuple_name(cover, face) + " missing");
        d.at(r, static_cast<std::size_t>(it - src.begin())) += (j % 2 == 0) ? 1 : -1;
      }
    }
    cx.coboundary.push_back(std::move(d));
  }
  return cx;
}

std::vector<int> cohomology_dims(const CechComplex& cx) {
  std::vector<int> dims;
  std::size_t prev_rank = 0;
  for (std::size_t q = 0; q < cx.coboundary.size(); ++q) {
    const std::size_t rank = exact_rank(cx.coboundary[q]);
    dims.push_back(static_cast<int>(cx.basis[q].size() - rank - prev_rank));
    prev_rank = rank;
  }
  return dims;
}

bool coboundary_squares_to_zero(const CechComplex& cx) {
  for (std::size_t q = 0; q + 1 < cx.coboundary.size(); ++q)
    if (!is_zero(multiply(cx.coboundary[q + 1], cx.coboundary[q]))) return false;
  return true;
}

DeRhamReport de_rham_spotcheck(const DeRhamFixture& fx, double closed_tol, double exact_tol,
                               const QuadratureRule& rule) {
  DeRhamReport r;
  r.fixture = fx.name;
  r.dims = cohomology_dims(build_complex(fx.cover, fx.max_degree));
  bool ok = true;
  for (const auto& alpha : fx.battery) {
    std::vector<SingularCube> cert, tests;
    for (const auto& c : fx.certificate_cubes)
      if (c.dim() == alpha.degree() + 1) cert.push_back(c);
    for (const auto& c : fx.test_cubes)
      if (c.dim() == alpha.degree()) tests.push_back(c);
    if (!certify_closed(alpha, cert, closed_tol, rule).passed) continue;
    ++r.closed_forms;
    const auto q = static_cast<std::size_t>(alpha.degree());
    if (q >= r.dims.size() || r.dims[q] != 0) continue;
    if (!fx.contraction) {
      ok = false;
      r.note = "closed form predicted exact but the fixture has no contraction";
      continue;
    }
    const GeneratorForm beta = poincare_antiderivative(alpha, *fx.contraction, cert, closed_tol, rule);
    const GeneratorForm diff = exterior_derivative(beta) - alpha;
    for (const auto& c : tests) r.max_exactness_residual = std::max(r.max_exactness_residual, std::abs(pair(diff, c, rule)));
    ++r.exact_checked;
  }
  if (r.max_exactness_residual > exact_tol) ok = false;
  if (fx.period_form && fx.cycle) {
    r.period = pair(*fx.period_form, *fx.cycle, rule);
    const auto q = static_cast<std::size_t>(fx.period_form->degree());
    const bool has_class = q < r.dims.size() && r.dims[q] > 0;
    if (has_class != (std::abs(*r.period) > 1e-6)) {
      ok = false;
      r.note = "period and cohomology disagree";
    }
  }
  r.consistent = ok;
  return r;
}

}  // namespace diffspace
