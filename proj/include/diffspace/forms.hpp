#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "diffspace/chains.hpp"
#include "diffspace/diff_space.hpp"
#include "diffspace/quadrature.hpp"

namespace diffspace {

/// c · λ_p(f₀, …, f_p) with the f_i given by ambient representatives.
struct FormTerm {
  double coefficient = 1.0;
  std::vector<SmoothMap> entries;  // p+1 scalar maps on the ambient space
};

/// A real combination of generator-tuple cochains λ_p(f₀, …, f_p) on a space.
///
/// Forms are compared only through their pairings with cubes; no
/// antisymmetrisation or simplification of tuples is attempted.
class GeneratorForm {
 public:
  GeneratorForm(SpacePtr space, int degree, std::vector<FormTerm> terms = {});

  /// λ_p(f₀, …, f_p) for elements of one space.
  static GeneratorForm lambda(const std::vector<StructureElement>& entries, double coefficient = 1.0);
  static GeneratorForm lambda(const SpacePtr& space, const std::vector<SmoothMap>& entries, double coefficient = 1.0);

  const SpacePtr& space() const noexcept { return space_; }
  int degree() const noexcept { return degree_; }
  const std::vector<FormTerm>& terms() const noexcept { return terms_; }

  GeneratorForm& operator+=(const GeneratorForm& other);
  friend GeneratorForm operator+(GeneratorForm a, const GeneratorForm& b) { return a += b; }
  friend GeneratorForm operator-(GeneratorForm a, const GeneratorForm& b) { return a += (-1.0) * b; }
  friend GeneratorForm operator*(double c, GeneratorForm a);

  std::string to_string() const;

 private:
  SpacePtr space_;
  int degree_;
  std::vector<FormTerm> terms_;
};

/// ⟨α, σ⟩ = Σ c ∫_{J^p} (f₀∘σ) det D(f₁∘σ, …, f_p∘σ) dt with a fixed rule.
/// For p = 0 this is Σ c f₀(σ()).
double lambda_eval(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule = {});

struct PairingResult {
  double value = 0.0;
  int order = 0;
  int panels = 0;
  bool converged = true;
};

/// Pairing with escalation: the requested rule is compared against order 24,
/// then panels are doubled until successive values agree within `rel_tol`
/// (plus a floor of 1e-13 times Σ|w·integrand| for cancelling integrals).
PairingResult pair_adaptive(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule = {},
                            double rel_tol = 1e-10, int max_panels = 64);

/// Σ coefficient · ⟨α, cube⟩ over the chain, each by pair_adaptive.
double pair(const GeneratorForm& alpha, const CubicalChain& chain, const QuadratureRule& rule = {});
double pair(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule = {});

/// Independent evaluator through the classical form g₀ dg₁∧…∧dg_p: the
/// ambient coefficients are expanded over coordinate p-subsets and paired
/// with the cube's minors (Cauchy–Binet).
double classical_eval(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule = {});

/// dλ_p(f₀, …, f_p) = λ_{p+1}(𝟏, f₀, …, f_p).
GeneratorForm exterior_derivative(const GeneratorForm& alpha);

/// (f₀,…,f_p) ∧ (g₀,…,g_q) = (f₀g₀, f₁,…,f_p, g₁,…,g_q), bilinear.
GeneratorForm wedge(const GeneratorForm& alpha, const GeneratorForm& beta);

/// F*α on `source`, entries f ↦ f∘F.  F: ℝᵐ → ℝⁿ must map sampled points of
/// source into α's space.
GeneratorForm pullback_form(const SmoothMap& F, const GeneratorForm& alpha, const SpacePtr& source);

/// max over the cubes of |⟨dφ, σ⟩ − ⟨Σ (∂F/∂u_i ∘ g) dg_i, σ⟩| with φ = F(g).
double chain_rule_residual(const SmoothMap& F, const std::vector<StructureElement>& g,
                           const std::vector<SingularCube>& cubes, const QuadratureRule& rule = {});

/// |⟨dα, σ⟩ − ⟨α, ∂σ⟩|.
double stokes_residual(const GeneratorForm& alpha, const SingularCube& sigma, const QuadratureRule& rule = {});

/// Rewrites a form on I × S (coordinates (t, x)) as terms a·dz_K over
/// coordinate subsets K: type 1 terms (a, t, x_{k₂}, …) and type 2 terms
/// (a, x_{k₁}, …).  Pairings are unchanged.
GeneratorForm split_product_form(const GeneratorForm& omega);

/// K*ω for ω on I × S in split shape: (a, t, e₂, …) ↦ (∫₀¹ a dt, e₂, …) and
/// type 2 terms ↦ 0.  `base` is S.  ValidationError on any other shape.
GeneratorForm prism_pullback(const GeneratorForm& omega, const SpacePtr& base, int fiber_order = 16);

/// K* after split_product_form.
GeneratorForm homotopy_operator(const GeneratorForm& omega, const SpacePtr& base, int fiber_order = 16);

/// u_i*ω for ω on I × S.
GeneratorForm endpoint_pullback(int i, const GeneratorForm& omega, const SpacePtr& base);

struct ClosednessCertificate {
  double max_pairing = 0.0;
  std::size_t cubes = 0;
  bool passed = false;
};

/// max |⟨dα, σ⟩| over cubes of dimension deg α + 1.
ClosednessCertificate certify_closed(const GeneratorForm& alpha, const std::vector<SingularCube>& cubes,
                                     double tolerance, const QuadratureRule& rule = {});

/// β = K*(h*α) for a closed α of degree ≥ 1, where h: I × S → S has
/// h(1, x) = x and h(0, x) = x₀.  ValidationError when the closedness
/// certificate fails.
GeneratorForm poincare_antiderivative(const GeneratorForm& alpha, const SmoothMap& contraction,
                                      const std::vector<SingularCube>& certificate_cubes,
                                      double tolerance = 1e-9, const QuadratureRule& rule = {});

/// Random polynomial in n variables with small rational coefficients and
/// total degree ≤ degree.
SmoothMap random_polynomial(int n, int degree, std::mt19937_64& rng);

/// Random degree-p form with `terms` terms of polynomial entries.
GeneratorForm random_polynomial_form(const SpacePtr& space, int p, int degree, int terms, std::mt19937_64& rng);

}  // namespace diffspace
