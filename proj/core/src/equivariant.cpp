#include "eqloc/equivariant.hpp"

#include <algorithm>
#include <cmath>

namespace eqloc {

Chart CotangentChart::total() const {
  Chart c;
  c.name = "T*" + base.name;
  c.dim = dim();
  c.bounds = base.bounds;
  c.bounds.insert(c.bounds.end(), fiber_bounds.begin(), fiber_bounds.end());
  c.orientation = 1;
  c.covers_almost_all = false;
  return c;
}

MixedForm equivariant_differential(const MixedForm& alpha, const VectorField& X, const Differentiation& diff) {
  if (alpha.dim() != X.dim()) throw DimensionError("equivariant_differential: dimension mismatch");
  return exterior_derivative(alpha, diff) + (-contract(X.components(), alpha));
}

double closedness_residual(const MixedForm& alpha, const VectorField& X, std::span<const Point> samples,
                           const Differentiation& diff) {
  const MixedForm dg = equivariant_differential(alpha, X, diff);
  double worst = 0.0;
  for (int k : dg.degrees()) {
    const KForm part = dg.grade(k);
    for (const auto& p : samples)
      for (double c : part(p)) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

Function cotangent_projection(int n) {
  return Function(2 * n, n, [n]<class S>(std::span<const S> x, std::span<S> y) {
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  });
}

KForm moment_map(const VectorField& X) {
  const int n = X.dim();
  const Function field = X.components();
  return KForm::scalar(2 * n, Function(
                                  2 * n, 1,
                                  [field, n]<class S>(std::span<const S> x, std::span<S> y) {
                                    Scratch<S, kMaxDim * 2> v;
                                    field(x.first(static_cast<std::size_t>(n)), v.first(static_cast<std::size_t>(n)));
                                    S acc(0.0);
                                    for (int i = 0; i < n; ++i) acc += x[static_cast<std::size_t>(n + i)] * v.data[static_cast<std::size_t>(i)];
                                    y[0] = acc;
                                  },
                                  field.max_order()));
}

KForm canonical_symplectic(int n) {
  if (n < 1) throw DimensionError("canonical_symplectic: n must be positive");
  std::vector<double> comps(static_cast<std::size_t>(binomial(2 * n, 2)), 0.0);
  for (int i = 0; i < n; ++i) comps[static_cast<std::size_t>(index_of(2 * n, MultiIndex{{i, n + i}}))] = 1.0;
  return KForm::constant(2 * n, 2, std::move(comps));
}

MixedForm omega_extension(const MixedForm& alpha, const VectorField& X) {
  const auto degrees = alpha.degrees();
  for (int k : degrees)
    if ((k - degrees.front()) % 2 != 0)
      throw DimensionError("omega_extension: form mixes even and odd degrees");
  const int n = alpha.dim();
  const MixedForm exponent = MixedForm(moment_map(X)).with(canonical_symplectic(n));
  return wedge(exp_even(exponent), extend(alpha, 2 * n));
}

EquivariantData cotangent_data(const MixedForm& alpha, const VectorField& X) {
  return {canonical_symplectic(alpha.dim()), moment_map(X), omega_extension(alpha, X)};
}

}  // namespace eqloc
