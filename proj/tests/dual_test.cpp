#include <doctest.h>

#include <cmath>

#include "eqloc/function.hpp"

namespace eqloc::test {

TEST_CASE("dual numbers carry exact first derivatives") {
  const Dual<double> x(0.7, 1.0);
  const auto y = sin(x) * exp(x) / (1.0 + x * x);
  const double s = std::sin(0.7), c = std::cos(0.7), e = std::exp(0.7), q = 1.0 + 0.49;
  CHECK(y.v == doctest::Approx(s * e / q).epsilon(1e-15));
  CHECK(y.d == doctest::Approx((c * e + s * e) / q - s * e * 1.4 / (q * q)).epsilon(1e-14));
  const auto r = sqrt(x) + log(x) + asin(0.5 * x) + atan(x);
  CHECK(r.d == doctest::Approx(0.5 / std::sqrt(0.7) + 1 / 0.7 + 0.5 / std::sqrt(1 - 0.1225) + 1 / q).epsilon(1e-14));
}

TEST_CASE("nested duals give mixed second derivatives") {
  using D2 = Dual<Dual<double>>;
  const D2 x(Dual<double>(0.3, 1.0), Dual<double>(0.0, 0.0));
  const D2 y(Dual<double>(-0.4, 0.0), Dual<double>(1.0, 0.0));
  const D2 f = x * x * y + sin(x * y);
  // d^2 f / dx dy = 2x + cos(xy) - xy sin(xy)
  CHECK(f.d.d == doctest::Approx(0.6 + std::cos(-0.12) + 0.12 * std::sin(-0.12)).epsilon(1e-14));
  CHECK(jet_order_v<Jet<3>> == 3);
  CHECK(primal(f) == doctest::Approx(-0.036 + std::sin(-0.12)));
}

TEST_CASE("functions refuse jets above their declared order") {
  const Function f(1, 1, []<class S>(std::span<const S> x, std::span<S> y) { y[0] = x[0] * x[0]; }, 1);
  const Dual<double> x[1] = {Dual<double>(2.0, 1.0)};
  Dual<double> y[1];
  f(std::span<const Dual<double>>(x), std::span<Dual<double>>(y));
  CHECK(y[0].d == 4.0);
  const Jet<2> x2[1] = {Jet<2>(2.0)};
  Jet<2> y2[1];
  CHECK_THROWS_AS(f(std::span<const Jet<2>>(x2), std::span<Jet<2>>(y2)), NotDifferentiable);
}

TEST_CASE("opaque functions differentiate only by finite differences") {
  const Function f = Function::opaque(2, 1, [](std::span<const double> x, std::span<double> y) {
    y[0] = std::sin(x[0]) * x[1];
  });
  const std::vector<double> p{0.4, 2.0};
  CHECK_THROWS_AS(jacobian(f, p), NotDifferentiable);
  const auto J = jacobian(f, p, Differentiation::finite(1e-6));
  CHECK(J[0] == doctest::Approx(2.0 * std::cos(0.4)).epsilon(1e-9));
  CHECK(J[1] == doctest::Approx(std::sin(0.4)).epsilon(1e-9));
}

TEST_CASE("jacobian by dual numbers matches central differences") {
  const Function f(3, 2, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[0] * exp(x[1]) - x[2];
    y[1] = cos(x[0] * x[2]) + x[1] * x[1];
  });
  const std::vector<double> p{0.2, -0.5, 1.3};
  const auto ad = jacobian(f, p);
  const auto fd = jacobian(f, p, Differentiation::finite(1e-6));
  for (std::size_t i = 0; i < ad.size(); ++i) CHECK(ad[i] == doctest::Approx(fd[i]).epsilon(1e-8));
  CHECK(ad[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

}  // namespace eqloc::test
