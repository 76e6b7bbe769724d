#pragma once

// Scalar types the expression evaluator is instantiated for:
//   double         plain evaluation
//   Rational       exact evaluation of rational (polynomial/division) trees
//   Dual<T>        forward-mode derivative of T, nestable for higher orders

#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "diffspace/error.hpp"

namespace diffspace {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

/// Dual number v + d·ε with ε² = 0.  The tangent slot has the same type as
/// the value slot, so Dual<Dual<double>> carries second derivatives.
template <typename T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value, T tangent) : v(std::move(value)), d(std::move(tangent)) {}
  explicit Dual(double c) : v(T(c)), d(T(0.0)) {}
};

template <typename T>
struct dual_depth : std::integral_constant<int, 0> {};
template <typename T>
struct dual_depth<Dual<T>> : std::integral_constant<int, 1 + dual_depth<T>::value> {};
template <typename T>
inline constexpr int dual_depth_v = dual_depth<T>::value;

template <typename T>
struct is_rational_based : std::false_type {};
template <>
struct is_rational_based<Rational> : std::true_type {};
template <typename T>
struct is_rational_based<Dual<T>> : is_rational_based<T> {};

/// Deepest derivative nesting the evaluator will instantiate.
inline constexpr int kMaxDualDepth = 3;

// ---- value extraction -------------------------------------------------------

inline double value_of(double x) { return x; }
inline double value_of(const Rational& x) { return x.convert_to<double>(); }
template <typename T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

inline bool is_exact_zero(double x) { return x == 0.0; }
inline bool is_exact_zero(const Rational& x) { return x == 0; }
template <typename T>
bool is_exact_zero(const Dual<T>& x) {
  return is_exact_zero(x.v);
}

template <typename T>
T from_double(double c) {
  if constexpr (std::is_same_v<T, double>) {
    return c;
  } else if constexpr (std::is_same_v<T, Rational>) {
    return Rational(c);
  } else {
    using Inner = decltype(T{}.v);
    return T(from_double<Inner>(c), from_double<Inner>(0.0));
  }
}

template <typename T>
T from_fraction(std::int64_t num, std::int64_t den) {
  if constexpr (std::is_same_v<T, double>) {
    return static_cast<double>(num) / static_cast<double>(den);
  } else if constexpr (std::is_same_v<T, Rational>) {
    return Rational(num, den);
  } else {
    using Inner = decltype(T{}.v);
    return T(from_fraction<Inner>(num, den), from_double<Inner>(0.0));
  }
}

// ---- dual arithmetic --------------------------------------------------------

template <typename T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <typename T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <typename T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <typename T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <typename T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

// ---- primitives -------------------------------------------------------------
// Rational overloads throw: only the rational-closed operations are exact.

[[noreturn]] inline void throw_non_rational(const char* name) {
  throw EvalError(std::string("primitive '") + name +
                  "' cannot be evaluated in exact rational arithmetic");
}

inline double s_exp(double x) { return std::exp(x); }
inline double s_log(double x) { return std::log(x); }
inline double s_sin(double x) { return std::sin(x); }
inline double s_cos(double x) { return std::cos(x); }
inline double s_sqrt(double x) { return std::sqrt(x); }

inline Rational s_exp(const Rational&) { throw_non_rational("exp"); }
inline Rational s_log(const Rational&) { throw_non_rational("log"); }
inline Rational s_sin(const Rational&) { throw_non_rational("sin"); }
inline Rational s_cos(const Rational&) { throw_non_rational("cos"); }
inline Rational s_sqrt(const Rational&) { throw_non_rational("sqrt"); }

template <typename T>
Dual<T> s_exp(const Dual<T>& a) {
  T e = s_exp(a.v);
  return {e, e * a.d};
}
template <typename T>
Dual<T> s_log(const Dual<T>& a) {
  return {s_log(a.v), a.d / a.v};
}
template <typename T>
Dual<T> s_sin(const Dual<T>& a) {
  return {s_sin(a.v), s_cos(a.v) * a.d};
}
template <typename T>
Dual<T> s_cos(const Dual<T>& a) {
  return {s_cos(a.v), -(s_sin(a.v) * a.d)};
}
template <typename T>
Dual<T> s_sqrt(const Dual<T>& a) {
  T r = s_sqrt(a.v);
  return {r, a.d / (from_double<T>(2.0) * r)};
}

// h(x) = exp(-1/x²) for x ≠ 0, h(0) = 0.  Every derivative vanishes at 0, and
// once exp underflows the value and all derivatives are returned as exact 0.
inline double s_bump(double x) {
  if (x == 0.0) return 0.0;
  return std::exp(-1.0 / (x * x));
}
inline Rational s_bump(const Rational&) { throw_non_rational("bump"); }

template <typename T>
Dual<T> s_bump(const Dual<T>& a);

// h'(x) = 2 x⁻³ h(x)
template <typename T>
T bump_derivative(const T& x) {
  T h = s_bump(x);
  if (is_exact_zero(h)) return from_double<T>(0.0);
  return from_double<T>(2.0) * h / (x * x * x);
}

template <typename T>
Dual<T> s_bump(const Dual<T>& a) {
  return {s_bump(a.v), bump_derivative(a.v) * a.d};
}

template <typename T>
T int_power(const T& base, int exponent) {
  if (exponent < 0) return from_double<T>(1.0) / int_power(base, -exponent);
  T result = from_double<T>(1.0);
  T b = base;
  int e = exponent;
  while (e > 0) {
    if (e & 1) result = result * b;
    e >>= 1;
    if (e > 0) b = b * b;
  }
  return result;
}

}  // namespace diffspace
