#pragma once

// Closed-form and independently computed reference values. The frozen
// constants are checked against the oracles in oracles_test.cpp.

#include <cmath>
#include <functional>
#include <numbers>

namespace eqloc::test {

// Composite Simpson rule with 2 * half_panels panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int half_panels = 4000) {
  const int n = 2 * half_panels;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline double sphere_oracle() {
  return 2.0 * std::numbers::pi * simpson([](double t) { return std::sin(t); }, 0.0, std::numbers::pi);
}

inline double sphere_exp_oracle() {
  return 2.0 * std::numbers::pi *
         simpson([](double t) { return std::exp(std::cos(t)) * std::sin(t); }, 0.0, std::numbers::pi);
}

inline constexpr double kSphereLhs = 12.566370614359172;      // 4 pi
inline constexpr double kSphereExpLhs = 14.76801374576529;    // 2 pi (e - 1/e)
inline constexpr double kS2xS2Lhs = 157.91367041742973;       // 16 pi^2
inline constexpr double kTorusArea = 39.47841760435743;       // 4 pi^2
inline constexpr double kPoleLimit = 6.283185307179586;       // 2 pi

}  // namespace eqloc::test
