#pragma once

// Charts, Riemannian metrics and vector fields in local coordinates, and the
// Model bundle that ties them to an equivariant form.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eqloc/forms.hpp"

namespace eqloc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct Chart {
  std::string name;
  int dim = 0;
  std::vector<Interval> bounds;
  int orientation = 1;  // +1 or -1 relative to the manifold orientation
  bool covers_almost_all = false;

  Box box() const;
  void validate() const;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(Function components);

  int dim() const { return f_.in_dim(); }
  const Function& components() const { return f_; }
  std::vector<double> operator()(std::span<const double> x) const { return f_(x); }

 private:
  Function f_;
};

// g as a row-major n x n matrix field.
class Metric {
 public:
  Metric() = default;
  explicit Metric(Function g);

  int dim() const { return dim_; }
  const Function& components() const { return g_; }
  Eigen::MatrixXd at(std::span<const double> x) const;

 private:
  Function g_;
  int dim_ = 0;
};

class NotPositiveDefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

void require_spd(const Metric& g, std::span<const double> x);

// X_M(x) = d/de flow(-e, x) at e = 0, i.e. minus the generator of the flow.
// `flow` maps (e, x_1..x_n) to n coordinates.
VectorField vector_field_from_flow(const Function& flow, std::span<const Point> samples = {},
                                   double tolerance = 1e-12);

// Covector field (g v)_i = g_ij v^j.
Function metric_dual(const Metric& g, const VectorField& v);

// max over samples of |(L_X g)_ij|.
double lie_derivative_metric_residual(const Metric& g, const VectorField& X,
                                      std::span<const Point> samples,
                                      const Differentiation& diff = {});

double norm_sq(const Metric& g, const VectorField& v, std::span<const double> p);

// Midpoints of a per_axis^n grid of sub-boxes of the chart.
std::vector<Point> interior_samples(const Chart& chart, int per_axis);

// Everything a model specifies on one chart.
struct ChartData {
  Chart chart;
  Metric metric;
  VectorField field;
  MixedForm alpha{0};
  std::optional<Function> flow;  // (e, x) -> x, generating `field`
};

// Maps from the unit box [0,1]^n into the integration chart whose images
// tile the integration chart minus the preimages of the fixed-point cubes of
// half-width eps.
using TailCells = std::function<std::vector<Function>(double eps)>;

struct Model {
  std::string name;
  std::string description;
  ChartData integration;
  std::vector<ChartData> fixed_point_charts;
  int half_dim = 0;  // l = n / 2
  TailCells tail_cells;
  std::optional<double> expected_lhs;
  std::string provenance;
  std::vector<std::string> expected_failures;
  // Multiplies the tail and limit R values, for fields whose graph integrand
  // localizes more slowly than the unit sphere's.
  double decay_scale = 1.0;

  int dim() const { return integration.chart.dim; }
  bool is_control() const { return !expected_failures.empty(); }
  bool expects_failure(const std::string& check) const;
  const ChartData& chart(const std::string& name) const;
};

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const Model& model);

}  // namespace eqloc
