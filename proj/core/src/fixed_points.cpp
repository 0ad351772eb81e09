#include "eqloc/fixed_points.hpp"

#include <algorithm>
#include <cmath>

namespace eqloc {

Eigen::MatrixXd linearization(const VectorField& X, std::span<const double> p, const Differentiation& diff) {
  const int n = X.dim();
  const auto jac = jacobian(X.components(), p, diff);
  Eigen::MatrixXd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L(i, j) = -jac[static_cast<std::size_t>(i * n + j)];
  return L;
}

SqrtDet sqrt_det(const Eigen::MatrixXd& L, const Eigen::MatrixXd& g_p, int orientation, double skew_tolerance) {
  const Eigen::Index n = L.rows();
  if (L.cols() != n || g_p.rows() != n || g_p.cols() != n) throw DimensionError("sqrt_det: shape mismatch");
  if (n % 2 != 0) throw DimensionError("sqrt_det: dimension must be even");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if (n > 0 && svd.singularValues().minCoeff() <= 1e-10 * scale)
    throw DegenerateZero("degenerate zero: isolated-zero hypothesis violated (L_p is singular)");

  // g = C C^T; the columns of C^{-T} are g-orthonormal with positive determinant.
  Eigen::LLT<Eigen::MatrixXd> llt(g_p);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("sqrt_det: metric is not positive definite");
  Eigen::MatrixXd basis = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  if (orientation < 0) basis.col(n - 1) *= -1.0;

  Eigen::MatrixXd a = basis.fullPivLu().solve(L * basis);
  const double skew = (a + a.transpose()).cwiseAbs().maxCoeff();
  if (skew > skew_tolerance * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw MetricNotInvariant("metric not invariant at p: det^{1/2} ill-defined");
  a = 0.5 * (a - a.transpose());

  // In the normal form L e_{2i-1} = lam_i e_{2i}, the matrix of L has
  // entry (2i, 2i-1) = lam_i, so the product of the lam_i is Pf(A^T).
  const Eigen::MatrixXd at = a.transpose();
  SqrtDet out;
  out.value = pfaffian(at);
  out.frame_matrix = a;

  Eigen::RealSchur<Eigen::MatrixXd> schur(at);
  const Eigen::MatrixXd& t = schur.matrixT();
  for (Eigen::Index i = 0; i + 1 < n; i += 2) {
    const double b = t(i, i + 1);
    const double c = t(i + 1, i);
    out.lambdas.push_back(std::copysign(std::sqrt(std::abs(b * c)), b));
  }
  if (!out.lambdas.empty() && schur.matrixU().determinant() < 0.0) out.lambdas.front() *= -1.0;
  return out;
}

namespace {

struct NewtonResult {
  bool converged = false;
  Point x;
};

NewtonResult newton(const VectorField& X, const Chart& chart, Point x, const ZeroFindingConfig& config) {
  const int n = X.dim();
  const Box box = chart.box();
  for (int it = 0; it <= config.max_iterations; ++it) {
    const auto value = X(x);
    double norm = 0.0;
    for (double v : value) norm = std::max(norm, std::abs(v));
    if (!std::isfinite(norm)) return {};
    if (norm <= config.zero_tolerance) return {true, x};
    if (it == config.max_iterations) break;
    const auto jac = jacobian(X.components(), x);
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) {
      f(i) = value[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) J(i, j) = jac[static_cast<std::size_t>(i * n + j)];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (lu.rank() < n) return {};
    const Eigen::VectorXd step = lu.solve(f);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] -= step(i);
    if (!box.contains(x, 0.0)) return {};
  }
  return {};
}

std::vector<Point> seeds(const Chart& chart, const ZeroFindingConfig& config) {
  std::vector<Point> out;
  Point origin(static_cast<std::size_t>(chart.dim), 0.0);
  if (chart.box().contains(origin, 0.0)) out.push_back(origin);
  const auto grid = interior_samples(chart, config.grid_per_axis);
  out.insert(out.end(), grid.begin(), grid.end());
  return out;
}

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<Point> zeros_in_chart(const ChartData& data, const ZeroFindingConfig& config) {
  if (data.field.components().max_order() < 1)
    throw NotDifferentiable("find_zeros: vector field must be AD-capable");
  std::vector<Point> found;
  for (const auto& seed : seeds(data.chart, config)) {
    const auto result = newton(data.field, data.chart, seed, config);
    if (!result.converged) continue;
    const bool seen = std::any_of(found.begin(), found.end(),
                                  [&](const Point& p) { return distance(p, result.x) < config.dedup_radius; });
    if (!seen) found.push_back(result.x);
  }
  return found;
}

}  // namespace

std::vector<FixedPoint> find_zeros(const Model& model, const ZeroFindingConfig& config) {
  if (!zeros_in_chart(model.integration, config).empty())
    throw ModelError("model " + model.name + ": zero inside the integration chart; it must be covered by a fixed-point chart");

  std::vector<FixedPoint> out;
  for (const auto& data : model.fixed_point_charts) {
    const auto zeros = zeros_in_chart(data, config);
    if (zeros.empty()) throw ZeroNotFound("Newton failed from every seed in fixed-point chart " + data.chart.name);
    for (const auto& z : zeros) {
      FixedPoint fp;
      fp.chart = data.chart.name;
      fp.coords = z;
      fp.L = linearization(data.field, z);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(fp.L);
      if (svd.singularValues().minCoeff() <= 1e-10 * std::max(1.0, fp.L.cwiseAbs().maxCoeff()))
        throw DegenerateZero("degenerate zero: isolated-zero hypothesis violated in chart " + data.chart.name);
      out.push_back(std::move(fp));
    }
  }
  std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) {
    if (a.chart != b.chart) return a.chart < b.chart;
    return a.coords < b.coords;
  });
  return out;
}

std::vector<FixedPoint> fixed_points(const Model& model, const ZeroFindingConfig& config) {
  auto points = find_zeros(model, config);
  for (auto& fp : points) {
    const ChartData& data = model.chart(fp.chart);
    const auto sd = sqrt_det(fp.L, data.metric.at(fp.coords), data.chart.orientation);
    fp.sqrt_det = sd.value;
    fp.lambdas = sd.lambdas;
    fp.alpha0 = data.alpha.grade(0)(fp.coords)[0];
  }
  return points;
}

double local_contribution(const FixedPoint& fp) { return fp.alpha0 / fp.sqrt_det; }

}  // namespace eqloc
