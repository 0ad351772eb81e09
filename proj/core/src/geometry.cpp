#include "eqloc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace eqloc {

Box Chart::box() const {
  Box b;
  for (const auto& iv : bounds) {
    b.lower.push_back(iv.lo);
    b.upper.push_back(iv.hi);
  }
  return b;
}

void Chart::validate() const {
  if (dim <= 0 || dim > kMaxDim) throw ModelError("chart " + name + ": unsupported dimension");
  if (static_cast<int>(bounds.size()) != dim) throw ModelError("chart " + name + ": bounds do not match dimension");
  for (const auto& iv : bounds)
    if (!(iv.hi > iv.lo)) throw ModelError("chart " + name + ": empty coordinate interval");
  if (orientation != 1 && orientation != -1) throw ModelError("chart " + name + ": orientation must be +1 or -1");
}

VectorField::VectorField(Function components) : f_(std::move(components)) {
  if (f_.in_dim() != f_.out_dim()) throw DimensionError("vector field must map R^n to R^n");
}

Metric::Metric(Function g) : g_(std::move(g)) {
  dim_ = g_.in_dim();
  if (g_.out_dim() != dim_ * dim_) throw DimensionError("metric must have n*n components");
}

Eigen::MatrixXd Metric::at(std::span<const double> x) const {
  const auto values = g_(x);
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = values[static_cast<std::size_t>(i * dim_ + j)];
  return m;
}

void require_spd(const Metric& g, std::span<const double> x) {
  const Eigen::MatrixXd m = g.at(x);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw NotPositiveDefinite("metric is not symmetric at the queried point");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw NotPositiveDefinite("metric is not positive definite at the queried point");
}

VectorField vector_field_from_flow(const Function& flow, std::span<const Point> samples, double tolerance) {
  const int n = flow.out_dim();
  if (flow.in_dim() != n + 1) throw DimensionError("flow must map (e, x) in R^(n+1) to R^n");
  for (const auto& p : samples) {
    std::vector<double> in(static_cast<std::size_t>(n + 1), 0.0);
    std::copy(p.begin(), p.end(), in.begin() + 1);
    const auto image = flow(in);
    for (int i = 0; i < n; ++i)
      if (std::abs(image[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]) > tolerance * (1.0 + std::abs(p[static_cast<std::size_t>(i)])))
        throw std::invalid_argument("flow at time zero is not the identity");
  }
  if (flow.max_order() < 1) throw NotDifferentiable("flow must be differentiable in time");
  return VectorField(Function(
      n, n,
      [flow, n]<class S>(std::span<const S> x, std::span<S> y) {
        Scratch<S, kMaxDim * 2> in;
        in.data[0] = S(0.0);
        for (int i = 0; i < n; ++i) in.data[static_cast<std::size_t>(i + 1)] = x[static_cast<std::size_t>(i)];
        partial<S>(flow, in.cfirst(static_cast<std::size_t>(n + 1)), 0, y, Differentiation{});
        for (auto& v : y) v = -v;
      },
      flow.max_order() - 1));
}

Function metric_dual(const Metric& g, const VectorField& v) {
  const int n = g.dim();
  if (v.dim() != n) throw DimensionError("metric_dual: dimension mismatch");
  const Function gf = g.components();
  const Function vf = v.components();
  return Function(
      n, n,
      [gf, vf, n]<class S>(std::span<const S> x, std::span<S> y) {
        Scratch<S> gm;
        Scratch<S, kMaxDim * 2> vv;
        gf(x, gm.first(static_cast<std::size_t>(n * n)));
        vf(x, vv.first(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i) {
          S acc(0.0);
          for (int j = 0; j < n; ++j) acc += gm.data[static_cast<std::size_t>(i * n + j)] * vv.data[static_cast<std::size_t>(j)];
          y[static_cast<std::size_t>(i)] = acc;
        }
      },
      std::min(gf.max_order(), vf.max_order()));
}

double lie_derivative_metric_residual(const Metric& g, const VectorField& X, std::span<const Point> samples,
                                      const Differentiation& diff) {
  const int n = g.dim();
  if (X.dim() != n) throw DimensionError("lie derivative: dimension mismatch");
  double worst = 0.0;
  for (const auto& p : samples) {
    const Eigen::MatrixXd gp = g.at(p);
    const auto xv = X(p);
    const auto dg = jacobian(g.components(), p, diff);   // (n*n) x n
    const auto dx = jacobian(X.components(), p, diff);   // n x n, dx[k*n+i] = d_i X^k
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double lie = 0.0;
        for (int k = 0; k < n; ++k) {
          lie += xv[static_cast<std::size_t>(k)] * dg[static_cast<std::size_t>((i * n + j) * n + k)];
          lie += gp(k, j) * dx[static_cast<std::size_t>(k * n + i)];
          lie += gp(i, k) * dx[static_cast<std::size_t>(k * n + j)];
        }
        worst = std::max(worst, std::abs(lie));
      }
    }
  }
  return worst;
}

double norm_sq(const Metric& g, const VectorField& v, std::span<const double> p) {
  const Eigen::MatrixXd gp = g.at(p);
  const auto vv = v(p);
  const Eigen::Map<const Eigen::VectorXd> vec(vv.data(), static_cast<Eigen::Index>(vv.size()));
  return vec.dot(gp * vec);
}

std::vector<Point> interior_samples(const Chart& chart, int per_axis) {
  const int n = chart.dim;
  std::vector<Point> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Point p(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const auto& iv = chart.bounds[static_cast<std::size_t>(a)];
      p[static_cast<std::size_t>(a)] = iv.lo + (idx[static_cast<std::size_t>(a)] + 0.5) * iv.width() / per_axis;
    }
    out.push_back(std::move(p));
    int a = 0;
    while (a < n && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n) break;
  }
  return out;
}

bool Model::expects_failure(const std::string& check) const {
  return std::find(expected_failures.begin(), expected_failures.end(), check) != expected_failures.end();
}

const ChartData& Model::chart(const std::string& chart_name) const {
  if (integration.chart.name == chart_name) return integration;
  for (const auto& c : fixed_point_charts)
    if (c.chart.name == chart_name) return c;
  throw ModelError("model " + name + " has no chart named " + chart_name);
}

namespace {

void validate_chart_data(const ChartData& data, int n) {
  data.chart.validate();
  if (data.chart.dim != n) throw ModelError("chart " + data.chart.name + " has the wrong dimension");
  if (data.metric.dim() != n) throw ModelError("chart " + data.chart.name + ": metric dimension mismatch");
  if (data.field.dim() != n) throw ModelError("chart " + data.chart.name + ": vector field dimension mismatch");
  if (data.alpha.dim() != n) throw ModelError("chart " + data.chart.name + ": form dimension mismatch");
  const auto degrees = data.alpha.degrees();
  for (int k : degrees)
    if ((k - degrees.front()) % 2 != 0)
      throw ModelError("chart " + data.chart.name + ": form mixes even and odd degrees");
}

}  // namespace

void validate(const Model& model) {
  const int n = model.dim();
  if (n % 2 != 0) throw ModelError("model " + model.name + ": manifold dimension must be even");
  if (model.half_dim * 2 != n) throw ModelError("model " + model.name + ": declared l does not equal n/2");
  if (!model.integration.chart.covers_almost_all)
    throw ModelError("model " + model.name + ": integration chart must cover almost all of M");
  validate_chart_data(model.integration, n);
  for (const auto& c : model.fixed_point_charts) {
    if (c.chart.covers_almost_all)
      throw ModelError("model " + model.name + ": exactly one chart may be the integration chart");
    validate_chart_data(c, n);
  }
}

}  // namespace eqloc
