#include "diffspace/forms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "diffspace/error.hpp"

namespace diffspace {

namespace {

void check_cube(const GeneratorForm& alpha, const SingularCube& sigma) {
  if (alpha.degree() != sigma.dim())
    throw DimensionError("cannot pair a " + std::to_string(alpha.degree()) + "-form with a " +
                         std::to_string(sigma.dim()) + "-cube");
  if (sigma.representative.output_dim() != alpha.space()->ambient_dim())
    throw DimensionError("cube and form live in different ambient spaces");
}

// All increasing k-subsets of {0, …, n−1}.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

SmoothMap scalar_from_node(int n, NodePtr node) { return SmoothMap(n, {std::move(node)}); }

}  // namespace

GeneratorForm::GeneratorForm(SpacePtr space, int degree, std::vector<FormTerm> terms)
    : space_(std::move(space)), degree_(degree), terms_(std::move(terms)) {
  if (!space_) throw DimensionError("form without a space");
  if (degree_ < 0) throw DimensionError("negative form degree");
  const int n = space_->ambient_dim();
  for (const auto& t : terms_) {
    if (static_cast<int>(t.entries.size()) != degree_ + 1)
      throw DimensionError("a " + std::to_string(degree_) + "-form term needs " + std::to_string(degree_ + 1) +
                           " entries, got " + std::to_string(t.entries.size()));
    for (const auto& e : t.entries)
      if (e.input_dim() != n || e.output_dim() != 1)
        throw DimensionError("form entry " + e.to_string() + " is not a function on R^" + std::to_string(n));
  }
}

GeneratorForm GeneratorForm::lambda(const std::vector<StructureElement>& entries, double coefficient) {
  if (entries.empty()) throw DimensionError("lambda of an empty tuple");
  std::vector<SmoothMap> reps;
  for (const auto& e : entries) {
    if (e.space != entries.front().space) throw DimensionError("tuple entries live on different spaces");
    reps.push_back(e.representative);
  }
  return lambda(entries.front().space, reps, coefficient);
}

GeneratorForm GeneratorForm::lambda(const SpacePtr& space, const std::vector<SmoothMap>& entries, double coefficient) {
  if (entries.empty()) throw DimensionError("lambda of an empty tuple");
  return GeneratorForm(space, static_cast<int>(entries.size()) - 1, {FormTerm{coefficient, entries}});
}

GeneratorForm& GeneratorForm::operator+=(const GeneratorForm& other) {
  if (other.degree_ != degree_) throw DimensionError("sum of forms of different degree");
  if (other.space_->ambient_dim() != space_->ambient_dim()) throw DimensionError("sum of forms on different spaces");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

GeneratorForm operator*(double c, GeneratorForm a) {
  for (auto& t : a.terms_) t.coefficient *= c;
  return a;
}

std::string GeneratorForm::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << terms_[i].coefficient << "*L" << degree_ << "(";
    for (std::size_t j = 0; j < terms_[i].entries.size(); ++j)
      os << (j ? ", " : "") << terms_[i].entries[j].to_string();
    os << ")";
  }
  return os.str();
}

namespace {

struct QuadSum {
  double value = 0.0;
  double magnitude = 0.0;  // Σ |w · term|, the scale of cancellation noise
};

QuadSum integrate_form(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule) {
  check_cube(alpha, sigma);
  const int p = alpha.degree();
  QuadSum out;
  if (p == 0) {
    const Point x = sigma(std::span<const double>());
    for (const auto& t : alpha.terms()) {
      const double v = t.coefficient * t.entries[0].evaluate_scalar(x);
      out.value += v;
      out.magnitude += std::abs(v);
    }
    return out;
  }
  Eigen::MatrixXd m(p, p);
  rule.for_each_node(sigma.box.bounds, [&](std::span<const double> s, double w) {
    if (w == 0.0) return;
    const Jet js = sigma.representative.jet(s);
    const Point x(js.value.data(), js.value.data() + js.value.size());
    for (const auto& t : alpha.terms()) {
      const double f0 = t.entries[0].evaluate_scalar(x);
      if (f0 == 0.0) continue;
      for (int i = 0; i < p; ++i) m.row(i) = t.entries[static_cast<std::size_t>(i + 1)].derivatives_along(x, js.jacobian);
      const double v = w * t.coefficient * f0 * m.determinant();
      out.value += v;
      out.magnitude += std::abs(v);
    }
  });
  return out;
}

}  // namespace

double lambda_eval(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule) {
  return integrate_form(alpha, sigma, rule).value;
}

PairingResult pair_adaptive(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule,
                            double rel_tol, int max_panels) {
  QuadratureRule cur = rule;
  const QuadSum first = integrate_form(alpha, sigma, cur);
  double prev = first.value;
  if (alpha.degree() == 0) return {prev, cur.order, cur.panels, true};
  QuadratureRule next{std::max(24, rule.order), rule.panels};
  while (true) {
    const QuadSum q = integrate_form(alpha, sigma, next);
    const double v = q.value;
    const double scale = std::max(std::abs(v), std::abs(prev));
    const double noise = 1e-13 * std::max(q.magnitude, first.magnitude);
    if (std::abs(v - prev) <= rel_tol * scale + noise + 1e-15) return {v, next.order, next.panels, true};
    if (next.panels * 2 > max_panels) return {v, next.order, next.panels, false};
    prev = v;
    next.panels *= 2;
  }
}

double pair(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule) {
  return pair_adaptive(alpha, sigma, rule).value;
}

double pair(const GeneratorForm& alpha, const CubicalChain& chain, const QuadratureRule& rule) {
  double sum = 0.0;
  for (const auto& t : chain.terms()) sum += static_cast<double>(t.coefficient) * pair(alpha, t.cube, rule);
  return sum;
}

double classical_eval(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule) {
  check_cube(alpha, sigma);
  const int p = alpha.degree();
  const int n = alpha.space()->ambient_dim();
  if (p == 0) return lambda_eval(alpha, sigma, rule);
  const auto ks = subsets(n, p);
  double total = 0.0;
  rule.for_each_node(sigma.box.bounds, [&](std::span<const double> s, double w) {
    if (w == 0.0) return;
    const Jet js = sigma.representative.jet(s);
    const Point x(js.value.data(), js.value.data() + js.value.size());
    for (const auto& t : alpha.terms()) {
      Eigen::MatrixXd g(p, n);
      for (int i = 0; i < p; ++i) g.row(i) = t.entries[static_cast<std::size_t>(i + 1)].gradient(x).transpose();
      const double g0 = t.entries[0].evaluate_scalar(x);
      double form_on_cube = 0.0;
      for (const auto& k : ks) {
        Eigen::MatrixXd coef(p, p), minor(p, p);
        for (int a = 0; a < p; ++a) {
          coef.col(a) = g.col(k[static_cast<std::size_t>(a)]);
          minor.row(a) = js.jacobian.row(k[static_cast<std::size_t>(a)]);
        }
        form_on_cube += coef.determinant() * minor.determinant();
      }
      total += w * t.coefficient * g0 * form_on_cube;
    }
  });
  return total;
}

GeneratorForm exterior_derivative(const GeneratorForm& alpha) {
  const int n = alpha.space()->ambient_dim();
  std::vector<FormTerm> terms;
  for (const auto& t : alpha.terms()) {
    FormTerm d{t.coefficient, {SmoothMap::constant_scalar(n, 1.0)}};
    d.entries.insert(d.entries.end(), t.entries.begin(), t.entries.end());
    terms.push_back(std::move(d));
  }
  return GeneratorForm(alpha.space(), alpha.degree() + 1, std::move(terms));
}

GeneratorForm wedge(const GeneratorForm& alpha, const GeneratorForm& beta) {
  if (alpha.space()->ambient_dim() != beta.space()->ambient_dim())
    throw DimensionError("wedge of forms on different spaces");
  std::vector<FormTerm> terms;
  for (const auto& a : alpha.terms())
    for (const auto& b : beta.terms()) {
      FormTerm t{a.coefficient * b.coefficient, {a.entries[0] * b.entries[0]}};
      t.entries.insert(t.entries.end(), a.entries.begin() + 1, a.entries.end());
      t.entries.insert(t.entries.end(), b.entries.begin() + 1, b.entries.end());
      terms.push_back(std::move(t));
    }
  return GeneratorForm(alpha.space(), alpha.degree() + beta.degree(), std::move(terms));
}

GeneratorForm pullback_form(const SmoothMap& F, const GeneratorForm& alpha, const SpacePtr& source) {
  if (F.input_dim() != source->ambient_dim() || F.output_dim() != alpha.space()->ambient_dim())
    throw DimensionError("pullback map " + F.to_string() + " does not go from " + source->name() + " to " +
                         alpha.space()->name());
  for (const auto& x : source->sample(7, 64))
    if (!alpha.space()->contains(F.evaluate(x)))
      throw MembershipError("pullback map sends a sample of " + source->name() + " outside " + alpha.space()->name());
  std::vector<FormTerm> terms;
  for (const auto& t : alpha.terms()) {
    FormTerm out{t.coefficient, {}};
    for (const auto& e : t.entries) out.entries.push_back(compose(e, F));
    terms.push_back(std::move(out));
  }
  return GeneratorForm(source, alpha.degree(), std::move(terms));
}

double chain_rule_residual(const SmoothMap& F, const std::vector<StructureElement>& g,
                           const std::vector<SingularCube>& cubes, const QuadratureRule& rule) {
  if (g.empty() || F.input_dim() != static_cast<int>(g.size()) || F.output_dim() != 1)
    throw DimensionError("outer function arity does not match the tuple");
  const SpacePtr& space = g.front().space;
  const int n = space->ambient_dim();
  std::vector<SmoothMap> reps;
  for (const auto& e : g) reps.push_back(e.representative);
  const SmoothMap inner = stack(reps);
  const SmoothMap phi = compose(F, inner);
  const GeneratorForm lhs = GeneratorForm::lambda(space, {SmoothMap::constant_scalar(n, 1.0), phi});
  GeneratorForm rhs(space, 1);
  for (int i = 0; i < F.input_dim(); ++i)
    rhs += GeneratorForm::lambda(space, {compose(partial_derivative(F, i), inner), reps[static_cast<std::size_t>(i)]});
  double worst = 0.0;
  for (const auto& c : cubes) worst = std::max(worst, std::abs(pair(lhs, c, rule) - pair(rhs, c, rule)));
  return worst;
}

double stokes_residual(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule) {
  return std::abs(pair(exterior_derivative(alpha), sigma, rule) - pair(alpha, boundary(sigma), rule));
}

GeneratorForm split_product_form(const GeneratorForm& omega) {
  const int n1 = omega.space()->ambient_dim();
  const int p = omega.degree();
  if (p == 0) return omega;
  std::vector<FormTerm> terms;
  for (const auto& t : omega.terms()) {
    std::vector<NodePtr> rows;
    for (int i = 1; i <= p; ++i) rows.push_back(t.entries[static_cast<std::size_t>(i)].component_node(0));
    for (const auto& k : subsets(n1, p)) {
      const bool live = std::all_of(k.begin(), k.end(), [&](int col) {
        return std::any_of(rows.begin(), rows.end(), [col](const NodePtr& r) { return depends_on(r, col); });
      });
      if (!live) continue;
      FormTerm s{t.coefficient, {t.entries[0] * scalar_from_node(n1, make_jacobian_det(rows, k))}};
      for (int col : k) s.entries.push_back(SmoothMap::coordinate(n1, col));
      terms.push_back(std::move(s));
    }
  }
  return GeneratorForm(omega.space(), p, std::move(terms));
}

GeneratorForm prism_pullback(const GeneratorForm& omega, const SpacePtr& base, int fiber_order) {
  const int n = base->ambient_dim();
  if (omega.space()->ambient_dim() != n + 1)
    throw DimensionError("prism pullback needs a form on I x " + base->name());
  const int p = omega.degree();
  if (p == 0) throw DimensionError("prism pullback of a 0-form");
  std::vector<FormTerm> terms;
  for (const auto& t : omega.terms()) {
    const auto& e1 = t.entries[1].component_node(0);
    const bool rest_free = std::all_of(t.entries.begin() + 2, t.entries.end(),
                                       [](const SmoothMap& e) { return !e.depends_on(0); });
    const auto idx = variable_index(e1);
    if (idx && *idx == 0 && rest_free) {
      FormTerm out{t.coefficient,
                   {scalar_from_node(n, make_fiber_integral(t.entries[0].component_node(0), fiber_order))}};
      for (auto it = t.entries.begin() + 2; it != t.entries.end(); ++it) out.entries.push_back(fix_first_input(*it, 0.0));
      terms.push_back(std::move(out));
    } else if (!t.entries[1].depends_on(0) && rest_free) {
      continue;
    } else {
      throw ValidationError("form term " + t.entries[1].to_string() +
                            " is neither a dt term nor free of t; split the form first");
    }
  }
  return GeneratorForm(base, p - 1, std::move(terms));
}

GeneratorForm homotopy_operator(const GeneratorForm& omega, const SpacePtr& base, int fiber_order) {
  return prism_pullback(split_product_form(omega), base, fiber_order);
}

GeneratorForm endpoint_pullback(int i, const GeneratorForm& omega, const SpacePtr& base) {
  const int n = base->ambient_dim();
  std::vector<NodePtr> comps{make_constant(static_cast<double>(i))};
  for (int k = 0; k < n; ++k) comps.push_back(make_variable(k));
  return pullback_form(SmoothMap(n, std::move(comps)), omega, base);
}

ClosednessCertificate certify_closed(const GeneratorForm& alpha, const std::vector<SingularCube>& cubes,
                                     double tolerance, const QuadratureRule& rule) {
  ClosednessCertificate c;
  const GeneratorForm d = exterior_derivative(alpha);
  for (const auto& s : cubes) {
    c.max_pairing = std::max(c.max_pairing, std::abs(pair(d, s, rule)));
    ++c.cubes;
  }
  c.passed = c.cubes > 0 && c.max_pairing < tolerance;
  return c;
}

GeneratorForm poincare_antiderivative(const GeneratorForm& alpha, const SmoothMap& contraction,
                                      const std::vector<SingularCube>& certificate_cubes, double tolerance,
                                      const QuadratureRule& rule) {
  if (alpha.degree() < 1) throw DimensionError("antiderivative of a 0-form");
  const ClosednessCertificate cert = certify_closed(alpha, certificate_cubes, tolerance, rule);
  if (!cert.passed)
    throw ValidationError("closedness certificate failed: max |<d alpha, sigma>| = " + std::to_string(cert.max_pairing) +
                          " over " + std::to_string(cert.cubes) + " cubes");
  const SpacePtr product = product_with_interval(alpha.space());
  return homotopy_operator(pullback_form(contraction, alpha, product), alpha.space());
}

SmoothMap random_polynomial(int n, int degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den_pick(0, 2);
  std::bernoulli_distribution keep(0.5);
  constexpr std::int64_t dens[] = {1, 2, 4};
  NodePtr acc;
  std::vector<int> exps(static_cast<std::size_t>(n), 0);
  auto emit = [&] {
    const int c = num(rng);
    const std::int64_t d = dens[den_pick(rng)];
    if (!keep(rng) || c == 0) return;
    NodePtr term = make_rational_constant(c, d);
    for (int i = 0; i < n; ++i)
      if (exps[static_cast<std::size_t>(i)] > 0)
        term = make_binary(BinaryOp::kMul, term, make_int_power(make_variable(i), exps[static_cast<std::size_t>(i)]));
    acc = acc ? make_binary(BinaryOp::kAdd, acc, term) : term;
  };
  auto rec = [&](auto&& self, int var, int left) -> void {
    if (var == n) {
      emit();
      return;
    }
    for (int e = 0; e <= left; ++e) {
      exps[static_cast<std::size_t>(var)] = e;
      self(self, var + 1, left - e);
    }
    exps[static_cast<std::size_t>(var)] = 0;
  };
  rec(rec, 0, degree);
  if (!acc) acc = make_variable(static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(n, 1))));
  return SmoothMap(n, {acc});
}

GeneratorForm random_polynomial_form(const SpacePtr& space, int p, int degree, int terms, std::mt19937_64& rng) {
  const int n = space->ambient_dim();
  std::uniform_int_distribution<int> coef(-4, 4);
  std::vector<FormTerm> out;
  for (int k = 0; k < terms; ++k) {
    int c = coef(rng);
    if (c == 0) c = 1;
    FormTerm t{c / 4.0, {}};
    for (int i = 0; i <= p; ++i) t.entries.push_back(random_polynomial(n, degree, rng));
    out.push_back(std::move(t));
  }
  return GeneratorForm(space, p, std::move(out));
}

}  // namespace diffspace
