#pragma once

// Zeros of X_M, their linearizations and the oriented square root of
// det(L_p).

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eqloc/geometry.hpp"

namespace eqloc {

// Pfaffian of a real skew-symmetric matrix by Parlett-Reid
// tridiagonalization with partial pivoting. Pf(A)^2 = det(A).
double pfaffian(Eigen::MatrixXd a);

struct ZeroFindingConfig {
  int grid_per_axis = 4;
  int max_iterations = 50;
  double zero_tolerance = 1e-12;
  double dedup_radius = 1e-6;
};

struct FixedPoint {
  std::string chart;
  Point coords;
  Eigen::MatrixXd L;
  std::vector<double> lambdas;  // rotation numbers; individual signs are frame-dependent
  double sqrt_det = 0.0;
  double alpha0 = 0.0;
};

class DegenerateZero : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MetricNotInvariant : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// L = -(dX^i/dx_j)(p), so that X = lam (x2 d1 - x1 d2) gives L e1 = lam e2.
Eigen::MatrixXd linearization(const VectorField& X, std::span<const double> p,
                              const Differentiation& diff = {});

struct SqrtDet {
  double value = 0.0;
  std::vector<double> lambdas;
  Eigen::MatrixXd frame_matrix;  // L in the oriented g-orthonormal frame
};

// det^{1/2}(L) computed as a Pfaffian in a positively oriented
// g_p-orthonormal frame.
SqrtDet sqrt_det(const Eigen::MatrixXd& L, const Eigen::MatrixXd& g_p, int orientation,
                 double skew_tolerance = 1e-8);

// Zeros of X_M in every fixed-point chart, sorted by chart name then
// coordinates. sqrt_det and alpha0 are left unset; see fixed_points().
std::vector<FixedPoint> find_zeros(const Model& model, const ZeroFindingConfig& config = {});

// find_zeros plus sqrt_det, rotation numbers and alpha0.
std::vector<FixedPoint> fixed_points(const Model& model, const ZeroFindingConfig& config = {});

double local_contribution(const FixedPoint& fp);

}  // namespace eqloc
