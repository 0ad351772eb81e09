#pragma once

// Built-in models with closed-form answers, and negative controls.

#include <string>
#include <vector>

#include "eqloc/geometry.hpp"

namespace eqloc::models {

struct Entry {
  std::string name;
  std::string summary;
};

std::vector<Entry> registry();

// Accepts the registry names; the scaled sphere also takes a factor as
// "sphere_scaled:<c>" (default c = 2).
Model build(const std::string& name);

// Building blocks, exposed for tests.
struct SphereOptions {
  double c = 1.0;             // X_M = c d/dphi
  bool exponential = false;   // alpha -> exp_even(alpha)
  bool ellipsoidal = false;   // metric induced from a stretched embedding
};

// Polar chart (theta, phi) on (0, pi) x (0, 2 pi).
ChartData sphere_polar(const SphereOptions& options);
// Orthogonal projection (x, y) onto the equatorial plane near a pole;
// side = +1 for the north pole, -1 for the south pole.
ChartData sphere_pole(const SphereOptions& options, int side);
// Cells of the polar chart covering the sphere minus both pole cubes
// |x|, |y| <= eps.
std::vector<Function> sphere_tail_cells(double eps);

ChartData torus_chart(const MixedForm& alpha);

// Product chart data on U x V with product metric, field and form.
ChartData product(const ChartData& a, const ChartData& b);

}  // namespace eqloc::models
