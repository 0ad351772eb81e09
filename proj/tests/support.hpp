#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eqloc/forms.hpp"

namespace eqloc::test {

inline std::vector<double> uniform(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = u(rng);
  return v;
}

// Components c0 + c_i x_i + c_ij x_i x_j with random coefficients.
inline KForm polynomial_form(int n, int k, std::mt19937_64& rng) {
  const int size = binomial(n, k);
  const int per = 1 + n + n * n;
  const auto c = uniform(rng, size * per);
  return KForm(n, k, Function(n, size, [c, n, size, per]<class S>(std::span<const S> x, std::span<S> y) {
    for (int s = 0; s < size; ++s) {
      const double* q = c.data() + s * per;
      S v(q[0]);
      for (int i = 0; i < n; ++i) v += q[1 + i] * x[i];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v += q[1 + n + i * n + j] * (x[i] * x[j]);
      y[s] = v;
    }
  }));
}

// A non-polynomial form: products of sin, cos and exp of linear terms.
inline KForm trig_form(int n, int k, std::mt19937_64& rng) {
  const int size = binomial(n, k);
  const auto a = uniform(rng, size * n);
  const auto b = uniform(rng, size * n);
  return KForm(n, k, Function(n, size, [a, b, n, size]<class S>(std::span<const S> x, std::span<S> y) {
    for (int s = 0; s < size; ++s) {
      S u(0.0), w(0.0);
      for (int i = 0; i < n; ++i) {
        u += a[s * n + i] * x[i];
        w += b[s * n + i] * x[i];
      }
      y[s] = sin(u) * exp(w) + cos(u * w);
    }
  }));
}

// Linear vector field x -> A x.
inline Function linear_field(const std::vector<double>& A, int n) {
  return Function(n, n, [A, n]<class S>(std::span<const S> x, std::span<S> y) {
    for (int i = 0; i < n; ++i) {
      S v(0.0);
      for (int j = 0; j < n; ++j) v += A[i * n + j] * x[j];
      y[i] = v;
    }
  });
}

// Quadratic vector field x -> A x + (x . B x) e.
inline Function quadratic_field(const std::vector<double>& A, const std::vector<double>& B, int n) {
  return Function(n, n, [A, B, n]<class S>(std::span<const S> x, std::span<S> y) {
    S q(0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) q += B[i * n + j] * (x[i] * x[j]);
    for (int i = 0; i < n; ++i) {
      S v = q * (0.25 * (i + 1));
      for (int j = 0; j < n; ++j) v += A[i * n + j] * x[j];
      y[i] = v;
    }
  });
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const KForm& a, const KForm& b, const std::vector<std::vector<double>>& points) {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, max_abs_diff(a(p), b(p)));
  return m;
}

inline std::vector<std::vector<double>> random_points(std::mt19937_64& rng, int n, int count, double r = 1.0) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) out.push_back(uniform(rng, n, -r, r));
  return out;
}

// Lie derivative of a k-form by the coordinate formula
//   (L_v a)(e_I) = v^j d_j a(e_I) + sum_r a(e_i1, .., d_ir v, .., e_ik).
inline std::vector<double> lie_derivative_oracle(const Function& v, const KForm& a, const std::vector<double>& p) {
  const int n = a.dim();
  const int k = a.degree();
  const auto vp = v(p);
  const auto Dv = jacobian(v, p);
  const auto Da = jacobian(a.coefficients(), p);
  const auto& indices = multi_indices(n, k);
  std::vector<double> out(indices.size(), 0.0);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += vp[j] * Da[s * n + j];
    const auto& axes = indices[s].axes;
    for (int r = 0; r < k; ++r) {
      std::vector<TangentVector> frame;
      for (int q = 0; q < k; ++q) {
        TangentVector e(static_cast<std::size_t>(n), 0.0);
        if (q == r) {
          for (int i = 0; i < n; ++i) e[i] = Dv[i * n + axes[q]];
        } else {
          e[axes[q]] = 1.0;
        }
        frame.push_back(std::move(e));
      }
      acc += eval_on_frame(a, p, frame);
    }
    out[s] = acc;
  }
  return out;
}

}  // namespace eqloc::test
