#pragma once

// Tensor-product Gauss-Legendre integration of top-degree forms over chart
// boxes, and of the cotangent-bundle form over graphs of sections.
//
// Summation is deterministic: nodes are grouped by their index along the
// first axis, each group is summed in lexicographic order, and the group
// sums are combined in index order. The thread count only decides which
// worker evaluates which group, so results are bit-identical for any
// `parallel` setting.

#include <vector>

#include "eqloc/geometry.hpp"

namespace eqloc {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;  // positive, summing to 2
};

const GaussLegendreRule& gauss_legendre(int m);

struct QuadratureGrid {
  std::vector<Interval> box;
  int nodes_per_axis = 0;
  std::vector<std::vector<double>> nodes;    // per axis, mapped into the box
  std::vector<std::vector<double>> weights;  // per axis, scaled by half-width

  static QuadratureGrid make(const std::vector<Interval>& box, int nodes_per_axis);
  double weight_sum() const;
  double volume() const;
  long long size() const;
};

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |value_m - value_2m|
  long long nodes_used = 0;
};

struct QuadratureOptions {
  int nodes = 0;     // per axis; 0 selects the default for the operation
  int parallel = 1;  // worker threads
  Differentiation diff{};
};

int default_nodes(int dim);

// Node count per axis for whole-chart graph integrals at deformation
// parameter R: max(32, 4 ceil(8 sqrt(1 + R))) for n <= 2, and
// max(16, 4 ceil(sqrt(2 (1 + R)))) for n >= 4, where the grid has n axes.
int node_schedule(double R, int dim = 2);

// Unsigned weighted sum of the single component of a top form on the grid.
double sum_top_form(const KForm& a, const QuadratureGrid& grid, int parallel = 1);

IntegrationResult integrate_top_form(const KForm& a, const Chart& chart, const QuadratureOptions& options = {});

// Integration region inside a chart: a list of orientation-preserving maps
// from the unit box [0,1]^n. An empty list means the whole chart box.
struct Region {
  std::vector<Function> cells;
  bool whole_chart() const { return cells.empty(); }
};

// Affine cell onto the box [lower, upper].
Function box_cell(const std::vector<Interval>& box);

// x -> (x, R s(x)) with s the metric dual of -X_M.
Function graph_section(const ChartData& data, double R);

// Pullback of omega_[n] along the graph of R s.
KForm graph_form(const ChartData& data, double R, const Differentiation& diff = {});

// The same n-form assembled on M directly: exp(-R |X|^2 - R d(s)) ^ alpha,
// top degree. Independent of the pullback machinery; used as a cross-check.
KForm graph_form_closed(const ChartData& data, double R, const Differentiation& diff = {});

IntegrationResult integrate_over_region(const KForm& a, const Chart& chart, const Region& region,
                                        const QuadratureOptions& options);

// Range of |X|^2 over the image of a cell, sampled on a 5^n grid.
double field_spread(const ChartData& data, const Function& cell);

// The graph integrand carries exp(-R |X|^2), so a cell sees about R times
// the spread of |X|^2 e-folds: max(16, 4 ceil(4 sqrt(1 + r))) with
// r = R * min(spread, 1).
int cell_node_schedule(double R, double spread);

// Nodes per axis default to node_schedule(R, n) on the whole chart and to
// cell_node_schedule(R, field_spread(data, cell)) on each cell of a region.
IntegrationResult integrate_graph(const ChartData& data, double R, const Region& region = {},
                                  const QuadratureOptions& options = {});
IntegrationResult integrate_graph(const Model& model, double R, const Region& region = {},
                                  const QuadratureOptions& options = {});

}  // namespace eqloc
