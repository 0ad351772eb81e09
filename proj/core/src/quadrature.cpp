#include "eqloc/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

#include "eqloc/equivariant.hpp"

namespace eqloc {

namespace {

// Neumaier compensated accumulator.
struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double total() const { return sum + carry; }
};

GaussLegendreRule compute_rule(int m) {
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  if (m % 2 == 1) rule.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
  return rule;
}

template <class Fn>
void parallel_for(int count, int threads, const Fn& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Chart unit_chart(int n, int orientation) {
  Chart c;
  c.name = "unit";
  c.dim = n;
  c.bounds.assign(static_cast<std::size_t>(n), Interval{0.0, 1.0});
  c.orientation = orientation;
  c.covers_almost_all = true;
  return c;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<const GaussLegendreRule>(compute_rule(m));
  return *slot;
}

QuadratureGrid QuadratureGrid::make(const std::vector<Interval>& box, int nodes_per_axis) {
  const auto& rule = gauss_legendre(nodes_per_axis);
  QuadratureGrid grid;
  grid.box = box;
  grid.nodes_per_axis = nodes_per_axis;
  for (const auto& iv : box) {
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double half = 0.5 * iv.width();
    std::vector<double> x, w;
    for (int i = 0; i < nodes_per_axis; ++i) {
      x.push_back(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
      w.push_back(half * rule.weights[static_cast<std::size_t>(i)]);
    }
    grid.nodes.push_back(std::move(x));
    grid.weights.push_back(std::move(w));
  }
  return grid;
}

double QuadratureGrid::weight_sum() const {
  double total = 1.0;
  for (const auto& w : weights) {
    Accumulator acc;
    for (double v : w) acc.add(v);
    total *= acc.total();
  }
  return total;
}

double QuadratureGrid::volume() const {
  double v = 1.0;
  for (const auto& iv : box) v *= iv.width();
  return v;
}

long long QuadratureGrid::size() const {
  long long s = 1;
  for (std::size_t a = 0; a < box.size(); ++a) s *= nodes_per_axis;
  return s;
}

int default_nodes(int dim) { return dim <= 2 ? 32 : 16; }

int node_schedule(double R, int dim) {
  if (R < 0.0) throw std::invalid_argument("node_schedule: R must be nonnegative");
  if (dim >= 4) return std::max(16, 4 * static_cast<int>(std::ceil(std::sqrt(2.0 * (1.0 + R)))));
  return std::max(32, 4 * static_cast<int>(std::ceil(8.0 * std::sqrt(1.0 + R))));
}

double sum_top_form(const KForm& a, const QuadratureGrid& grid, int parallel) {
  const int n = static_cast<int>(grid.box.size());
  if (a.dim() != n || a.degree() != n) throw DimensionError("integrate: form must be top-degree on the chart");
  if (a.is_zero()) return 0.0;
  const int m = grid.nodes_per_axis;
  std::vector<double> block(static_cast<std::size_t>(m), 0.0);
  parallel_for(m, parallel, [&](int i0) {
    Accumulator acc;
    std::array<double, kMaxDim> x{};
    std::array<int, kMaxDim> idx{};
    idx[0] = i0;
    double out = 0.0;
    while (true) {
      double w = 1.0;
      for (int a0 = 0; a0 < n; ++a0) {
        x[static_cast<std::size_t>(a0)] = grid.nodes[static_cast<std::size_t>(a0)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a0)])];
        w *= grid.weights[static_cast<std::size_t>(a0)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a0)])];
      }
      a.eval<double>(std::span<const double>(x.data(), static_cast<std::size_t>(n)), std::span<double>(&out, 1));
      acc.add(w * out);
      int axis = n - 1;
      while (axis >= 1 && ++idx[static_cast<std::size_t>(axis)] == m) idx[static_cast<std::size_t>(axis--)] = 0;
      if (axis < 1) break;
    }
    block[static_cast<std::size_t>(i0)] = acc.total();
  });
  Accumulator total;
  for (double b : block) total.add(b);
  return total.total();
}

IntegrationResult integrate_top_form(const KForm& a, const Chart& chart, const QuadratureOptions& options) {
  if (a.degree() != chart.dim || a.dim() != chart.dim)
    throw DimensionError("integrate_top_form: degree must equal the chart dimension");
  const int m = options.nodes > 0 ? options.nodes : default_nodes(chart.dim);
  const auto coarse = QuadratureGrid::make(chart.bounds, m);
  const auto fine = QuadratureGrid::make(chart.bounds, 2 * m);
  const double sign = chart.orientation;
  IntegrationResult r;
  r.value = sign * sum_top_form(a, coarse, options.parallel);
  const double refined = sign * sum_top_form(a, fine, options.parallel);
  r.error_estimate = std::abs(r.value - refined);
  r.nodes_used = coarse.size() + fine.size();
  return r;
}

Function box_cell(const std::vector<Interval>& box) {
  const int n = static_cast<int>(box.size());
  auto b = std::make_shared<const std::vector<Interval>>(box);
  return Function(n, n, [b]<class S>(std::span<const S> u, std::span<S> x) {
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = (*b)[i].lo + (*b)[i].width() * u[i];
  });
}

IntegrationResult integrate_over_region(const KForm& a, const Chart& chart, const Region& region,
                                        const QuadratureOptions& options) {
  if (region.whole_chart()) return integrate_top_form(a, chart, options);
  IntegrationResult total;
  const Chart unit = unit_chart(chart.dim, chart.orientation);
  for (const auto& cell : region.cells) {
    const auto r = integrate_top_form(pullback(cell, a, options.diff), unit, options);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.nodes_used += r.nodes_used;
  }
  return total;
}

Function graph_section(const ChartData& data, double R) {
  const int n = data.chart.dim;
  const Function dual = metric_dual(data.metric, data.field);
  return Function(
      n, 2 * n,
      [dual, n, R]<class S>(std::span<const S> x, std::span<S> y) {
        Scratch<S, kMaxDim * 2> s;
        dual(x, s.first(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i) {
          y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
          y[static_cast<std::size_t>(n + i)] = -R * s.data[static_cast<std::size_t>(i)];
        }
      },
      dual.max_order());
}

KForm graph_form(const ChartData& data, double R, const Differentiation& diff) {
  if (R < 0.0) throw std::invalid_argument("graph_form: R must be nonnegative");
  const int n = data.chart.dim;
  const MixedForm omega = omega_extension(data.alpha, data.field);
  return pullback(graph_section(data, R), omega.grade(n), diff);
}

KForm graph_form_closed(const ChartData& data, double R, const Differentiation& diff) {
  if (R < 0.0) throw std::invalid_argument("graph_form_closed: R must be nonnegative");
  const int n = data.chart.dim;
  const Function dual = metric_dual(data.metric, data.field);  // g X = -s
  const Function field = data.field.components();
  // s-flat = -(g X)_i dx_i; mu along R s is -R g(X, X).
  const KForm s_flat(n, 1, Function(
                               n, n,
                               [dual]<class S>(std::span<const S> x, std::span<S> y) {
                                 dual(x, y);
                                 for (auto& v : y) v = -v;
                               },
                               dual.max_order()));
  const KForm exponent0 = KForm::scalar(n, Function(
                                               n, 1,
                                               [dual, field, n, R]<class S>(std::span<const S> x, std::span<S> y) {
                                                 Scratch<S, kMaxDim * 2> gx, v;
                                                 dual(x, gx.first(static_cast<std::size_t>(n)));
                                                 field(x, v.first(static_cast<std::size_t>(n)));
                                                 S acc(0.0);
                                                 for (int i = 0; i < n; ++i) acc += gx.data[static_cast<std::size_t>(i)] * v.data[static_cast<std::size_t>(i)];
                                                 y[0] = -R * acc;
                                               },
                                               std::min(dual.max_order(), field.max_order())));
  MixedForm exponent(exponent0);
  if (auto ds = exterior_derivative(s_flat, diff)) exponent = exponent.with(-R * *ds);
  return wedge(exp_even(exponent), data.alpha).grade(n);
}

double field_spread(const ChartData& data, const Function& cell) {
  const int n = cell.in_dim();
  double lo = INFINITY;
  double hi = -INFINITY;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Point u(static_cast<std::size_t>(n));
  while (true) {
    for (int a = 0; a < n; ++a) u[static_cast<std::size_t>(a)] = 0.25 * idx[static_cast<std::size_t>(a)];
    const double q = norm_sq(data.metric, data.field, cell(u));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    int a = 0;
    while (a < n && ++idx[static_cast<std::size_t>(a)] == 5) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n) break;
  }
  return hi - lo;
}

int cell_node_schedule(double R, double spread) {
  if (R < 0.0) throw std::invalid_argument("cell_node_schedule: R must be nonnegative");
  const double r = R * std::clamp(spread, 0.0, 1.0);
  return std::max(16, 4 * static_cast<int>(std::ceil(4.0 * std::sqrt(1.0 + r))));
}

IntegrationResult integrate_graph(const ChartData& data, double R, const Region& region,
                                  const QuadratureOptions& options) {
  if (R < 0.0) throw std::invalid_argument("integrate_graph: R must be nonnegative");
  const KForm form = graph_form(data, R, options.diff);
  QuadratureOptions opts = options;
  if (region.whole_chart()) {
    if (opts.nodes <= 0) opts.nodes = node_schedule(R, data.chart.dim);
    return integrate_top_form(form, data.chart, opts);
  }
  IntegrationResult total;
  for (const auto& cell : region.cells) {
    opts.nodes = options.nodes > 0 ? options.nodes : cell_node_schedule(R, field_spread(data, cell));
    const auto r = integrate_over_region(form, data.chart, Region{{cell}}, opts);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.nodes_used += r.nodes_used;
  }
  return total;
}

IntegrationResult integrate_graph(const Model& model, double R, const Region& region,
                                  const QuadratureOptions& options) {
  return integrate_graph(model.integration, R, region, options);
}

}  // namespace eqloc
