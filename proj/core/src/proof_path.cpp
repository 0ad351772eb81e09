#include "eqloc/proof_path.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "eqloc/equivariant.hpp"

namespace eqloc {

namespace {

void require_schedule(std::span<const double> schedule, bool from_zero) {
  if (schedule.empty()) throw std::invalid_argument("R schedule is empty");
  if (from_zero && schedule.front() != 0.0) throw std::invalid_argument("deformation schedule must start at R = 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] >= 0.0) || !std::isfinite(schedule[i])) throw std::invalid_argument("R values must be finite and nonnegative");
    if (i > 0 && !(schedule[i] > schedule[i - 1])) throw std::invalid_argument("R schedule must increase strictly");
  }
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double DeformationFamily::max_relative_residual(double abs_floor) const {
  if (rows.empty()) return 0.0;
  const double base = std::abs(rows.front().I.value);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, base > abs_floor ? r.residual / base : r.residual);
  return worst;
}

DeformationFamily deformation_invariance(const Model& model, std::span<const double> schedule,
                                         const QuadratureOptions& options) {
  require_schedule(schedule, true);
  DeformationFamily family;
  for (double R : schedule) {
    DeformationRow row;
    row.R = R;
    row.nodes = options.nodes > 0 ? options.nodes : node_schedule(R, model.dim());
    row.I = integrate_graph(model, R, {}, options);
    row.residual = std::abs(row.I.value - (family.rows.empty() ? row.I.value : family.rows.front().I.value));
    family.rows.push_back(row);
  }
  return family;
}

ChainFrame chain_frame(const ChartData& data, std::span<const double> m, double t, const Differentiation& diff) {
  const int n = data.chart.dim;
  ChainFrame frame;
  frame.base.assign(m.begin(), m.end());
  frame.t = t;
  frame.point = graph_section(data, t)(m);
  const auto jac = jacobian(graph_section(data, t), m, diff);  // 2n x n
  for (int j = 0; j < n; ++j) {
    TangentVector v(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < 2 * n; ++i) v[static_cast<std::size_t>(i)] = jac[static_cast<std::size_t>(i * n + j)];
    frame.vectors.push_back(std::move(v));
  }
  const auto unit = graph_section(data, 1.0)(m);
  TangentVector vertical(static_cast<std::size_t>(2 * n), 0.0);
  for (int i = n; i < 2 * n; ++i) vertical[static_cast<std::size_t>(i)] = unit[static_cast<std::size_t>(i)];
  frame.vectors.push_back(std::move(vertical));
  return frame;
}

KForm chain_form(const ChartData& data, const Differentiation& diff) {
  const int n = data.chart.dim;
  const MixedForm omega = omega_extension(data.alpha, data.field);
  auto d = exterior_derivative(omega.grade(n), diff);
  if (!d) throw DimensionError("chain_form: omega_[n] is top-degree");
  return *d;
}

double frame_residual(const KForm& chain, const ChainFrame& frame) {
  const auto rows = static_cast<Eigen::Index>(frame.point.size());
  const auto cols = static_cast<Eigen::Index>(frame.vectors.size());
  Eigen::MatrixXd V(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) V(i, j) = frame.vectors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const double gram = std::sqrt(std::max(0.0, (V.transpose() * V).determinant()));
  if (!(gram > 0.0)) return 0.0;
  return std::abs(eval_on_frame(chain, frame.point, frame.vectors)) / gram;
}

double lemma_zero_residual(const Model& model, double R, int samples, std::uint64_t seed,
                           const Differentiation& diff) {
  if (R < 0.0) throw std::invalid_argument("lemma_zero_residual: R must be nonnegative");
  const auto& data = model.integration;
  const int n = data.chart.dim;
  const KForm chain = chain_form(data, diff);
  const auto grid = QuadratureGrid::make(data.chart.bounds, default_nodes(n));
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  Point m(static_cast<std::size_t>(n));
  for (int s = 0; s < samples; ++s) {
    for (int a = 0; a < n; ++a)
      m[static_cast<std::size_t>(a)] =
          grid.nodes[static_cast<std::size_t>(a)][static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(grid.nodes_per_axis))];
    const double t = R * uniform(rng);
    worst = std::max(worst, frame_residual(chain, chain_frame(data, m, t, diff)));
  }
  return worst;
}

std::vector<Interval> Cube::box() const {
  std::vector<Interval> b;
  for (double c : center) b.push_back({c - eps, c + eps});
  return b;
}

CubeRegion make_cubes(const Model& model, const std::vector<FixedPointRecord>& points, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw CubeError("cube half-width must be positive");
  CubeRegion region;
  region.eps = eps;
  for (const auto& r : points) {
    Cube cube{r.point.chart, r.point.coords, eps};
    const Chart& chart = model.chart(cube.chart).chart;
    const auto box = cube.box();
    for (std::size_t a = 0; a < box.size(); ++a)
      if (!(box[a].lo > chart.bounds[a].lo && box[a].hi < chart.bounds[a].hi))
        throw CubeError("cube around a zero in chart " + cube.chart + " leaves the chart");
    for (const auto& other : region.cubes) {
      if (other.chart != cube.chart) continue;
      double gap = 0.0;
      for (std::size_t a = 0; a < box.size(); ++a) gap = std::max(gap, std::abs(other.center[a] - cube.center[a]));
      if (gap <= 2.0 * eps) throw CubeError("cubes overlap in chart " + cube.chart);
    }
    region.cubes.push_back(std::move(cube));
  }
  return region;
}

TailTable tail_decay(const Model& model, const CubeRegion& cubes, std::span<const double> schedule,
                     const QuadratureOptions& options) {
  require_schedule(schedule, false);
  if (!model.tail_cells) throw std::invalid_argument("model " + model.name + " declares no tail region");
  const auto& data = model.integration;
  const Region region{model.tail_cells(cubes.eps)};

  TailTable table;
  table.delta_sq = INFINITY;
  const auto probe = QuadratureGrid::make(std::vector<Interval>(static_cast<std::size_t>(data.chart.dim), {0.0, 1.0}), 16);
  const auto probe_cells = region.whole_chart() ? std::vector<Function>{box_cell(data.chart.bounds)} : region.cells;
  for (const auto& cell : probe_cells) {
    const int n = data.chart.dim;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    Point u(static_cast<std::size_t>(n));
    while (true) {
      for (int a = 0; a < n; ++a) u[static_cast<std::size_t>(a)] = probe.nodes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      table.delta_sq = std::min(table.delta_sq, norm_sq(data.metric, data.field, cell(u)));
      int a = 0;
      while (a < n && ++idx[static_cast<std::size_t>(a)] == probe.nodes_per_axis) idx[static_cast<std::size_t>(a++)] = 0;
      if (a == n) break;
    }
  }
  for (double R : schedule) table.rows.push_back({R, integrate_graph(data, R, region, options)});
  return table;
}

LimitTable fixed_point_limit(const Model& model, const FixedPointRecord& point, const CubeRegion& cubes,
                             std::span<const double> schedule, const QuadratureOptions& options) {
  require_schedule(schedule, false);
  const auto cube = std::find_if(cubes.cubes.begin(), cubes.cubes.end(), [&](const Cube& c) {
    return c.chart == point.point.chart && c.center == point.point.coords;
  });
  if (cube == cubes.cubes.end()) throw CubeError("no cube around the requested zero");
  const ChartData& data = model.chart(point.point.chart);
  const Region region{{box_cell(cube->box())}};
  LimitTable table;
  table.chart = point.point.chart;
  table.coords = point.point.coords;
  table.target = std::pow(-2.0 * std::numbers::pi, model.half_dim) * point.contribution;
  for (double R : schedule) {
    LimitRow row;
    row.R = R;
    row.C = integrate_graph(data, R, region, options);
    row.error = std::abs(row.C.value - table.target);
    table.rows.push_back(row);
  }
  return table;
}

namespace {

Check proof_check(const Model& model, std::string name, double value, double tolerance, bool pass, std::string note = {}) {
  Check c;
  c.expected_failure = model.expects_failure(name);
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.pass = pass && std::isfinite(value);
  c.note = std::move(note);
  return c;
}

Check skip(const Model& model, std::string name, double tolerance, std::string why) {
  Check c;
  c.expected_failure = model.expects_failure(name);
  c.name = std::move(name);
  c.tolerance = tolerance;
  c.skipped = true;
  c.note = std::move(why);
  return c;
}

}  // namespace

void run_proof_path(const Model& model, const VerifyOptions& options, VerificationReport& report) {
  const Tolerances tol = options.tolerances(model.dim());
  const double lemma_tol = options.diff.automatic() ? tol.lemma_ad : tol.lemma_fd;
  const auto* closed = report.check("closedness");
  if (closed && !closed->pass) {
    const std::string why = "presupposes an equivariantly closed form";
    report.add(skip(model, "deformation_invariance", tol.deformation, why));
    report.add(skip(model, "lemma1", lemma_tol, why));
    report.add(skip(model, "tail_decay", tol.tail_ratio, why));
    report.add(skip(model, "gaussian_limit", tol.limit, why));
    report.add(skip(model, "partition_consistency", tol.partition_floor, why));
    return;
  }
  QuadratureOptions q = options.quadrature();

  const auto family = deformation_invariance(model, options.invariance_schedule, q);
  report.deformation = family.rows;
  report.add(proof_check(model, "deformation_invariance", family.max_relative_residual(tol.abs_tol), tol.deformation,
                         family.max_relative_residual(tol.abs_tol) <= tol.deformation,
                         "max |I(R) - I(0)| / |I(0)|"));

  report.lemma_residual = lemma_zero_residual(model, options.lemma_R, options.lemma_samples, options.seed, options.diff);
  report.add(proof_check(model, "lemma1", report.lemma_residual, lemma_tol, report.lemma_residual <= lemma_tol,
                         "max |d(omega_[n])| on chain frames, R = " + format_number(options.lemma_R)));

  const auto* points_check = report.check("fixed_points");
  const bool have_points = points_check && points_check->pass;
  if (!model.tail_cells || !have_points) {
    const std::string why = !have_points ? "fixed-point data unavailable" : "model declares no tail region";
    report.add(skip(model, "tail_decay", tol.tail_ratio, why));
    report.add(skip(model, "gaussian_limit", tol.limit, why));
    report.add(skip(model, "partition_consistency", tol.partition_floor, why));
    return;
  }

  std::vector<double> tail_schedule = options.tail_schedule;
  std::vector<double> limit_schedule = options.limit_schedule;
  if (model.decay_scale != 1.0) {
    for (double& R : tail_schedule) R *= model.decay_scale;
    for (double& R : limit_schedule) R *= model.decay_scale;
    report.notes.push_back("tail and limit R values scaled by " + format_number(model.decay_scale));
  }

  const CubeRegion cubes = make_cubes(model, report.fixed_points, options.eps);
  const TailTable tail = tail_decay(model, cubes, tail_schedule, q);
  report.tail = tail.rows;
  report.tail_delta_sq = tail.delta_sq;
  {
    double largest = 0.0;
    for (const auto& r : tail.rows) largest = std::max(largest, std::abs(r.T.value));
    if (largest <= tol.abs_tol) {
      report.add(proof_check(model, "tail_decay", largest, tol.abs_tol, true, "tail integral vanishes"));
    } else if (tail.rows.size() < 2) {
      report.add(proof_check(model, "tail_decay", 0.0, tol.tail_ratio, true, "single R value; no ratio to test"));
    } else {
      bool ok = true;
      double last_ratio = 0.0;
      double last_bound = 0.0;
      for (std::size_t i = 1; i < tail.rows.size(); ++i) {
        const double t0 = std::abs(tail.rows[i - 1].T.value);
        const double t1 = std::abs(tail.rows[i].T.value);
        const double bound = std::exp(-(tail.rows[i].R - tail.rows[i - 1].R) * tail.delta_sq / 2.0);
        last_ratio = t1 / t0;
        last_bound = bound;
        ok = ok && t1 < t0 && last_ratio <= bound;
      }
      const double cap = std::min(tol.tail_ratio, last_bound);
      ok = ok && last_ratio <= cap;
      report.add(proof_check(model, "tail_decay", last_ratio, cap, ok,
                             "T strictly decreasing, T(R2)/T(R1) <= exp(-(R2 - R1) delta^2 / 2), delta^2 = " +
                                 format_number(tail.delta_sq)));
    }
  }

  double worst_limit = 0.0;
  bool limit_ok = true;
  for (const auto& p : report.fixed_points) {
    auto table = fixed_point_limit(model, p, cubes, limit_schedule, q);
    const auto& rows = table.rows;
    const double rel = rows.back().error / std::abs(table.target);
    const double roundoff = 1e-12 * std::abs(table.target);
    worst_limit = std::max(worst_limit, rel);
    limit_ok = limit_ok && rel <= tol.limit;
    for (std::size_t i = rows.size() >= 3 ? rows.size() - 2 : 1; i < rows.size(); ++i)
      limit_ok = limit_ok && rows[i].error <= rows[i - 1].error + roundoff;
    for (const auto& r : rows)
      if (r.R >= 10.0 * model.decay_scale) limit_ok = limit_ok && std::signbit(r.C.value) == std::signbit(table.target);
    report.limits.push_back(std::move(table));
  }
  report.add(proof_check(model, "gaussian_limit", worst_limit, tol.limit, limit_ok,
                         "|C_p(R_max) - target| / |target|; error nonincreasing over the last three R up to 1e-12 |target|; signs agree for R >= 10"));

  // Cubes plus tail against the whole graph integral at every tail R.
  std::map<double, IntegrationResult> whole;
  for (const auto& r : report.deformation) whole[r.R] = r.I;
  double worst_gap = 0.0;
  double gap_tol = tol.partition_floor;
  bool partition_ok = true;
  for (const auto& t : tail.rows) {
    if (!whole.contains(t.R)) whole[t.R] = integrate_graph(model, t.R, {}, q);
    const IntegrationResult& I = whole[t.R];
    double sum = t.T.value;
    double err = t.T.error_estimate + I.error_estimate;
    for (const auto& table : report.limits) {
      const auto hit = std::find_if(table.rows.begin(), table.rows.end(), [&](const LimitRow& r) { return r.R == t.R; });
      IntegrationResult C;
      if (hit != table.rows.end()) {
        C = hit->C;
      } else {
        const auto p = std::find_if(report.fixed_points.begin(), report.fixed_points.end(), [&](const FixedPointRecord& r) {
          return r.point.chart == table.chart && r.point.coords == table.coords;
        });
        C = fixed_point_limit(model, *p, cubes, std::vector<double>{t.R}, q).rows.front().C;
      }
      sum += C.value;
      err += C.error_estimate;
    }
    const double gap = std::abs(sum - I.value);
    const double allowed = std::max(2.0 * err, tol.partition_floor * std::abs(I.value));
    partition_ok = partition_ok && gap <= allowed;
    if (gap >= worst_gap) {
      worst_gap = gap;
      gap_tol = allowed;
    }
  }
  report.add(proof_check(model, "partition_consistency", worst_gap, gap_tol, partition_ok,
                         "|sum C_p(R) + T(R) - I(R)| <= max(2 sum of error estimates, 1e-10 |I(R)|) at each tail R"));
}

VerificationReport verify_all(const Model& model, const VerifyOptions& options) {
  VerificationReport report = verify(model, options);
  if (options.proof_path) run_proof_path(model, options, report);
  return report;
}

}  // namespace eqloc
