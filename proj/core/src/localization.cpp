#include "eqloc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqloc/equivariant.hpp"

namespace eqloc {

Tolerances Tolerances::defaults(int dim) {
  Tolerances t;
  if (dim >= 4) t.rel_tol = 1e-5;
  return t;
}

bool Check::as_expected() const {
  if (expected_failure) return !skipped && !pass;
  return skipped || pass;
}

Tolerances VerifyOptions::tolerances(int dim) const {
  Tolerances t = Tolerances::defaults(dim);
  if (rel_tol) t.rel_tol = *rel_tol;
  if (!diff.automatic()) {
    t.closedness = 1e-5;
    t.metric_invariance = 1e-5;
    t.partition_floor = 1e-8;
  }
  return t;
}

QuadratureOptions VerifyOptions::quadrature() const {
  QuadratureOptions q;
  q.nodes = nodes;
  q.parallel = parallel;
  q.diff = diff;
  return q;
}

const Check* VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Check& VerificationReport::add(Check c) {
  checks.push_back(std::move(c));
  return checks.back();
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.as_expected(); });
}

IntegrationResult lhs(const Model& model, const QuadratureOptions& options) {
  const auto& data = model.integration;
  return integrate_top_form(data.alpha.grade(data.chart.dim), data.chart, options);
}

double rhs_from(const std::vector<FixedPointRecord>& points, int half_dim) {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : points) sum += r.contribution;
  return std::pow(-2.0 * std::numbers::pi, half_dim) * sum;
}

std::vector<FixedPointRecord> fixed_point_records(const Model& model) {
  std::vector<FixedPointRecord> out;
  for (auto& fp : fixed_points(model)) {
    FixedPointRecord r;
    r.contribution = local_contribution(fp);
    r.point = std::move(fp);
    out.push_back(std::move(r));
  }
  return out;
}

double rhs(const Model& model) { return rhs_from(fixed_point_records(model), model.half_dim); }

std::vector<Point> hypothesis_samples(const Chart& chart) {
  return interior_samples(chart, chart.dim <= 2 ? 8 : 3);
}

namespace {

double spectrum_residual(const Eigen::MatrixXd& L) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(L, false);
  double re = 0.0;
  double mag = 0.0;
  for (const auto& z : eig.eigenvalues()) {
    re = std::max(re, std::abs(z.real()));
    mag = std::max(mag, std::abs(z));
  }
  return mag > 0.0 ? re / mag : re;
}

Check make_check(const Model& model, std::string name, double value, double tolerance) {
  Check c;
  c.expected_failure = model.expects_failure(name);
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.pass = std::isfinite(value) && value <= tolerance;
  return c;
}

Check skipped_check(const Model& model, std::string name, double tolerance, std::string why) {
  Check c;
  c.expected_failure = model.expects_failure(name);
  c.name = std::move(name);
  c.tolerance = tolerance;
  c.skipped = true;
  c.note = std::move(why);
  return c;
}

}  // namespace

VerificationReport verify(const Model& model, const VerifyOptions& options) {
  validate(model);
  const int n = model.dim();
  const Tolerances tol = options.tolerances(n);
  VerificationReport report;
  report.model = model.name;
  report.dim = n;
  report.half_dim = model.half_dim;

  std::vector<const ChartData*> charts{&model.integration};
  for (const auto& c : model.fixed_point_charts) charts.push_back(&c);
  for (const auto* data : charts) {
    const auto samples = hypothesis_samples(data->chart);
    report.closedness_residual =
        std::max(report.closedness_residual, closedness_residual(data->alpha, data->field, samples, options.diff));
    report.metric_invariance_residual = std::max(
        report.metric_invariance_residual,
        lie_derivative_metric_residual(data->metric, data->field, samples, options.diff));
  }
  const Check& closed = report.add(make_check(model, "closedness", report.closedness_residual, tol.closedness));
  const bool is_closed = closed.pass;
  report.add(make_check(model, "metric_invariance", report.metric_invariance_residual, tol.metric_invariance));

  report.lhs = lhs(model, options.quadrature());

  bool have_points = false;
  try {
    report.fixed_points = fixed_point_records(model);
    double spectral = 0.0;
    for (const auto& r : report.fixed_points) spectral = std::max(spectral, spectrum_residual(r.point.L));
    report.add(make_check(model, "fixed_points", spectral, tol.spectrum));
    have_points = true;
  } catch (const std::exception& e) {
    Check c = make_check(model, "fixed_points", INFINITY, tol.spectrum);
    c.pass = false;
    c.note = e.what();
    report.add(std::move(c));
  }
  report.rhs = have_points ? rhs_from(report.fixed_points, model.half_dim) : NAN;

  const double theorem_tol = std::max(tol.abs_tol, tol.rel_tol * std::abs(report.rhs));
  if (!is_closed) {
    report.add(skipped_check(model, "theorem", theorem_tol, "form is not equivariantly closed; comparison skipped"));
  } else if (!have_points) {
    report.add(skipped_check(model, "theorem", tol.abs_tol, "fixed-point data unavailable; formula refused"));
  } else {
    Check c = make_check(model, "theorem", std::abs(report.lhs.value - report.rhs), theorem_tol);
    c.note = "|lhs - rhs| <= max(abs_tol, rel_tol |rhs|)";
    report.add(std::move(c));
  }
  return report;
}

}  // namespace eqloc
