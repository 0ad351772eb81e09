#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "eqloc/forms.hpp"
#include "support.hpp"

namespace eqloc::test {

TEST_CASE("multi-indices are lexicographic and index_of inverts them") {
  CHECK(binomial(8, 4) == 70);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(3, 4) == 0);
  const auto& idx = multi_indices(4, 2);
  REQUIRE(idx.size() == 6);
  CHECK(idx[0].axes == std::vector<int>{0, 1});
  CHECK(idx[1].axes == std::vector<int>{0, 2});
  CHECK(idx[5].axes == std::vector<int>{2, 3});
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto& all = multi_indices(n, k);
      for (int i = 0; i < static_cast<int>(all.size()); ++i) {
        CHECK(index_of(n, all[i]) == i);
        CHECK(index_of_mask(n, all[i].mask()) == i);
        CHECK(MultiIndex::from_mask(all[i].mask()) == all[i]);
      }
    }
}

TEST_CASE("basis wedges are alternating") {
  const KForm dx = KForm::basis(3, {{0}});
  const KForm dy = KForm::basis(3, {{1}});
  const std::vector<double> p{0.1, 0.2, 0.3};
  const auto xy = wedge(dx, dy)(p);
  const auto yx = wedge(dy, dx)(p);
  CHECK(xy == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(yx == std::vector<double>{-1.0, 0.0, 0.0});
  CHECK(max_abs(wedge(dx, dx)(p)) == 0.0);
  const std::vector<TangentVector> frame{{1, 0, 0}, {0, 1, 0}};
  CHECK(eval_on_frame(wedge(dx, dy), p, frame) == 1.0);
  const std::vector<TangentVector> swapped{{0, 1, 0}, {1, 0, 0}};
  CHECK(eval_on_frame(wedge(dx, dy), p, swapped) == -1.0);
}

TEST_CASE("operands of mismatched dimension or degree are rejected") {
  const KForm a = KForm::basis(3, {{0}});
  const KForm b = KForm::basis(2, {{0}});
  CHECK_THROWS_AS(a + b, DimensionError);
  CHECK_THROWS_AS(a + KForm::basis(3, {{0, 1}}), DimensionError);
  CHECK_THROWS_AS(wedge(a, b), DimensionError);
  CHECK_FALSE(exterior_derivative(KForm::basis(3, {{0, 1, 2}})).has_value());
}

TEST_CASE("graded commutativity") {
  std::mt19937_64 rng(11);
  const auto points = random_points(rng, 4, 20);
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q) {
      const KForm a = polynomial_form(4, p, rng);
      const KForm b = polynomial_form(4, q, rng);
      const double sign = (p * q) % 2 == 0 ? 1.0 : -1.0;
      CHECK(max_abs_diff(wedge(a, b), sign * wedge(b, a), points) <= 1e-12);
    }
}

TEST_CASE("wedge is associative") {
  std::mt19937_64 rng(12);
  const auto points = random_points(rng, 5, 10);
  const KForm a = polynomial_form(5, 1, rng);
  const KForm b = polynomial_form(5, 2, rng);
  const KForm c = polynomial_form(5, 1, rng);
  CHECK(max_abs_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c)), points) <= 1e-12);
}

TEST_CASE("d of d vanishes") {
  std::mt19937_64 rng(13);
  for (int n : {2, 3, 4, 6}) {
    const auto points = random_points(rng, n, 10);
    for (int k = 0; k + 2 <= n; ++k) {
      for (const KForm& a : {polynomial_form(n, k, rng), trig_form(n, k, rng)}) {
        const KForm dda = *exterior_derivative(*exterior_derivative(a));
        double worst = 0.0;
        for (const auto& p : points) worst = std::max(worst, max_abs(dda(p)));
        CHECK(worst <= 1e-10);
      }
    }
  }
}

TEST_CASE("d of d vanishes under finite differences") {
  std::mt19937_64 rng(14);
  const auto fd = Differentiation::finite(1e-5);
  const auto points = random_points(rng, 3, 10);
  for (int k = 0; k <= 1; ++k) {
    const KForm a = trig_form(3, k, rng);
    const KForm dda = *exterior_derivative(*exterior_derivative(a, fd), fd);
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, max_abs(dda(p)));
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("d of an exact 1-form matches the gradient") {
  const KForm f = KForm::scalar(2, Function(2, 1, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[0] * x[0] * x[1] + sin(x[1]);
  }));
  const auto df = (*exterior_derivative(f))(std::vector<double>{0.5, 0.25});
  CHECK(df[0] == doctest::Approx(2 * 0.5 * 0.25).epsilon(1e-15));
  CHECK(df[1] == doctest::Approx(0.25 + std::cos(0.25)).epsilon(1e-15));
}

TEST_CASE("Leibniz rule") {
  std::mt19937_64 rng(15);
  const auto points = random_points(rng, 4, 15);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; p + q + 1 <= 4; ++q) {
      const KForm a = polynomial_form(4, p, rng);
      const KForm b = polynomial_form(4, q, rng);
      const double sign = p % 2 == 0 ? 1.0 : -1.0;
      const KForm lhs = *exterior_derivative(wedge(a, b));
      const KForm rhs = wedge(*exterior_derivative(a), b) + sign * wedge(a, *exterior_derivative(b));
      CHECK(max_abs_diff(lhs, rhs, points) <= 1e-12);
    }
}

TEST_CASE("contraction is an antiderivation and squares to zero") {
  std::mt19937_64 rng(16);
  const int n = 4;
  const auto points = random_points(rng, n, 15);
  const Function v = quadratic_field(uniform(rng, n * n), uniform(rng, n * n), n);
  for (int p = 1; p <= 2; ++p) {
    const KForm a = polynomial_form(n, p, rng);
    const KForm b = polynomial_form(n, 2, rng);
    const double sign = p % 2 == 0 ? 1.0 : -1.0;
    const KForm lhs = contract(v, wedge(a, b));
    const KForm rhs = wedge(contract(v, a), b) + sign * wedge(a, contract(v, b));
    CHECK(max_abs_diff(lhs, rhs, points) <= 1e-12);
  }
  const KForm c = polynomial_form(n, 3, rng);
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, max_abs(contract(v, contract(v, c))(p)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("Cartan formula against the coordinate Lie derivative") {
  std::mt19937_64 rng(17);
  for (int n : {2, 3, 4}) {
    const auto points = random_points(rng, n, 10);
    const Function v = quadratic_field(uniform(rng, n * n), uniform(rng, n * n), n);
    for (int k = 0; k <= n; ++k) {
      const KForm a = polynomial_form(n, k, rng);
      KForm cartan = KForm::zero(n, k);
      if (k > 0) cartan = *exterior_derivative(contract(v, a));
      if (k < n) cartan = cartan + contract(v, *exterior_derivative(a));
      double worst = 0.0;
      for (const auto& p : points) worst = std::max(worst, max_abs_diff(cartan(p), lie_derivative_oracle(v, a, p)));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("pullback is functorial, commutes with d and with wedge") {
  std::mt19937_64 rng(18);
  const Function F(2, 3, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[0] * x[1];
    y[1] = sin(x[0]) + x[1];
    y[2] = exp(0.3 * x[1]);
  });
  const Function G(3, 3, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[0] + x[1] * x[2];
    y[1] = cos(x[1]);
    y[2] = x[2] * x[2] - x[0];
  });
  const Function GF(2, 3, [F, G]<class S>(std::span<const S> x, std::span<S> y) {
    std::array<S, 3> mid;
    F(x, std::span<S>(mid));
    G(std::span<const S>(mid), y);
  });
  const auto points = random_points(rng, 2, 10);
  const KForm a = trig_form(3, 1, rng);
  const KForm b = trig_form(3, 1, rng);
  CHECK(max_abs_diff(pullback(GF, a), pullback(F, pullback(G, a)), points) <= 1e-12);
  CHECK(max_abs_diff(pullback(F, *exterior_derivative(a)), *exterior_derivative(pullback(F, a)), points) <= 1e-11);
  CHECK(max_abs_diff(pullback(F, wedge(a, b)), wedge(pullback(F, a), pullback(F, b)), points) <= 1e-12);
}

TEST_CASE("pullback by a linear map scales top forms by the determinant") {
  std::mt19937_64 rng(19);
  const int n = 4;
  const auto A = uniform(rng, n * n);
  const KForm vol = KForm::constant(n, n, {1.0});
  const auto pulled = pullback(linear_field(A, n), vol)(std::vector<double>(n, 0.2));
  Eigen::Matrix4d M;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = A[i * n + j];
  CHECK(pulled[0] == doctest::Approx(M.determinant()).epsilon(1e-13));
}

TEST_CASE("extend agrees with pullback along the projection") {
  std::mt19937_64 rng(20);
  const KForm a = trig_form(2, 1, rng);
  const Function proj(5, 2, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[2];
    y[1] = x[3];
  });
  const auto points = random_points(rng, 5, 10);
  CHECK(max_abs_diff(extend(a, 5, 2), pullback(proj, a), points) == 0.0);
}

TEST_CASE("subset determinant agrees with LU") {
  std::mt19937_64 rng(21);
  for (int k = 1; k <= 8; ++k) {
    const auto m = uniform(rng, k * k);
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) M(i, j) = m[i * k + j];
    CHECK(determinant<double>(m, k) == doctest::Approx(M.determinant()).epsilon(1e-12));
  }
}

TEST_CASE("exp_even truncates the exponential series") {
  std::mt19937_64 rng(22);
  const KForm u = trig_form(4, 0, rng);
  const KForm b = polynomial_form(4, 2, rng);
  const MixedForm e = exp_even(MixedForm(u) + MixedForm(b));
  const auto points = random_points(rng, 4, 8);
  for (const auto& p : points) {
    const double eu = std::exp(u(p)[0]);
    CHECK(e.grade(0)(p)[0] == doctest::Approx(eu).epsilon(1e-14));
    const auto b1 = b(p);
    const auto e2 = e.grade(2)(p);
    for (std::size_t i = 0; i < b1.size(); ++i) CHECK(e2[i] == doctest::Approx(eu * b1[i]).epsilon(1e-13));
    const auto bb = wedge(b, b)(p);
    CHECK(e.grade(4)(p)[0] == doctest::Approx(eu * bb[0] / 2.0).epsilon(1e-13));
  }
  CHECK_FALSE(e.has(1));
}

}  // namespace eqloc::test
