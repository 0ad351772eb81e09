#pragma once

// Equivariant differential and the canonical data on the cotangent bundle.
// Cotangent charts use coordinates (x_1..x_n, z_1..z_n) where the point is
// the covector z_1 dx_1 + ... + z_n dx_n over x.

#include <span>
#include <vector>

#include "eqloc/geometry.hpp"

namespace eqloc {

struct CotangentChart {
  Chart base;
  std::vector<Interval> fiber_bounds;

  int dim() const { return 2 * base.dim; }
  Chart total() const;
};

// d_g a = d a - i(X) a.
MixedForm equivariant_differential(const MixedForm& alpha, const VectorField& X,
                                   const Differentiation& diff = {});

double closedness_residual(const MixedForm& alpha, const VectorField& X, std::span<const Point> samples,
                           const Differentiation& diff = {});

// The projection (x, z) -> x of T*U onto U.
Function cotangent_projection(int n);

// mu(X)(x, z) = sum_i z_i X^i(x), a 0-form on the 2n-chart.
KForm moment_map(const VectorField& X);

// sigma = dx_1 ^ dz_1 + ... + dx_n ^ dz_n.
KForm canonical_symplectic(int n);

// omega = exp(mu + sigma) ^ pi^* alpha. Does not check that alpha is
// equivariantly closed; negative controls rely on that.
MixedForm omega_extension(const MixedForm& alpha, const VectorField& X);

struct EquivariantData {
  KForm sigma;
  KForm mu;
  MixedForm omega;
};

EquivariantData cotangent_data(const MixedForm& alpha, const VectorField& X);

}  // namespace eqloc
