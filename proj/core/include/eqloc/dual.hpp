#pragma once

// Forward-mode automatic differentiation by truncated first-order Taylor
// arithmetic. Dual<T> nests: Dual<Dual<double>> carries mixed second
// derivatives, and each nesting level is an independent perturbation.

#include <cmath>
#include <type_traits>

namespace eqloc {

template <class T>
struct Dual {
  T v;  // value
  T d;  // tangent; both uninitialized by default, like double

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit constant lift
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }

  friend Dual operator+(const Dual& a, double c) { return {a.v + c, a.d}; }
  friend Dual operator+(double c, const Dual& a) { return {c + a.v, a.d}; }
  friend Dual operator-(const Dual& a, double c) { return {a.v - c, a.d}; }
  friend Dual operator-(double c, const Dual& a) { return {c - a.v, -a.d}; }
  friend Dual operator*(const Dual& a, double c) { return {a.v * c, a.d * c}; }
  friend Dual operator*(double c, const Dual& a) { return {c * a.v, c * a.d}; }
  friend Dual operator/(const Dual& a, double c) { return {a.v / c, a.d / c}; }
  friend Dual operator/(double c, const Dual& a) {
    T q = c / a.v;
    return {q, -q * a.d / a.v};
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

// Number of nested Dual layers; 0 for double.
template <class T>
struct jet_order : std::integral_constant<int, 0> {};
template <class T>
struct jet_order<Dual<T>> : std::integral_constant<int, 1 + jet_order<T>::value> {};
template <class T>
inline constexpr int jet_order_v = jet_order<T>::value;

namespace detail {
template <int K>
struct jet_type { using type = Dual<typename jet_type<K - 1>::type>; };
template <>
struct jet_type<0> { using type = double; };
}  // namespace detail

template <int K>
using Jet = typename detail::jet_type<K>::type;

inline constexpr double primal(double x) { return x; }
template <class T>
constexpr double primal(const Dual<T>& x) { return primal(x.v); }

// Elementary functions. The double overloads live here too so that generic
// code can call sin(x) unqualified for every scalar type.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double asin(double x) { return std::asin(x); }
inline double atan(double x) { return std::atan(x); }

template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
template <class T>
Dual<T> asin(const Dual<T>& a) { return {asin(a.v), a.d / sqrt(1.0 - a.v * a.v)}; }
template <class T>
Dual<T> atan(const Dual<T>& a) { return {atan(a.v), a.d / (1.0 + a.v * a.v)}; }

template <class S>
S square(const S& a) { return a * a; }

template <class S>
S ipow(const S& a, int n) {
  S r(1.0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

}  // namespace eqloc
