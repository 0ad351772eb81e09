#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace eqloc::cli {

using nlohmann::ordered_json;

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

ordered_json numbers(const std::vector<double>& xs) {
  ordered_json a = ordered_json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

ordered_json integration(const IntegrationResult& r) {
  return {{"value", number(r.value)}, {"error_estimate", number(r.error_estimate)},
          {"nodes", std::to_string(r.nodes_used)}};
}

ordered_json config_json(const RunConfig& c) {
  const auto& o = c.options;
  ordered_json j;
  j["command"] = c.command;
  j["nodes"] = std::to_string(o.nodes);
  j["eps"] = number(o.eps);
  j["r_schedule"] = numbers(o.invariance_schedule);
  j["tail_schedule"] = numbers(o.tail_schedule);
  j["limit_schedule"] = numbers(o.limit_schedule);
  j["lemma_R"] = number(o.lemma_R);
  j["lemma_samples"] = std::to_string(o.lemma_samples);
  j["rel_tol"] = o.rel_tol ? ordered_json(number(*o.rel_tol)) : ordered_json(nullptr);
  j["differentiation"] = o.diff.automatic() ? "automatic" : "finite_difference";
  if (!o.diff.automatic()) j["fd_step"] = number(o.diff.step);
  j["seed"] = std::to_string(o.seed);
  return j;
}

ordered_json point_json(const FixedPointRecord& r) {
  const auto& p = r.point;
  ordered_json L = ordered_json::array();
  for (Eigen::Index i = 0; i < p.L.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < p.L.cols(); ++k) row.push_back(number(p.L(i, k)));
    L.push_back(std::move(row));
  }
  return {{"chart", p.chart},
          {"coords", numbers(p.coords)},
          {"alpha0", number(p.alpha0)},
          {"sqrt_det", number(p.sqrt_det)},
          {"lambdas", numbers(p.lambdas)},
          {"contribution", number(r.contribution)},
          {"L", std::move(L)}};
}

}  // namespace

ordered_json report_json(const VerificationReport& report, const RunConfig& config) {
  ordered_json j;
  j["model"] = report.model;
  j["config"] = config_json(config);
  j["lhs"] = integration(report.lhs);
  j["rhs"] = number(report.rhs);

  ordered_json points = ordered_json::array();
  for (const auto& r : report.fixed_points) points.push_back(point_json(r));
  j["fixed_points"] = std::move(points);

  ordered_json deformation = ordered_json::array();
  for (const auto& r : report.deformation)
    deformation.push_back({{"R", number(r.R)},
                           {"I", number(r.I.value)},
                           {"residual", number(r.residual)},
                           {"error_estimate", number(r.I.error_estimate)},
                           {"nodes", std::to_string(r.nodes)}});
  j["deformation"] = std::move(deformation);

  ordered_json tail = ordered_json::array();
  for (const auto& r : report.tail)
    tail.push_back({{"R", number(r.R)}, {"T", number(std::abs(r.T.value))},
                    {"signed", number(r.T.value)}, {"error_estimate", number(r.T.error_estimate)}});
  j["tail"] = std::move(tail);

  ordered_json limits = ordered_json::array();
  for (const auto& t : report.limits) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows)
      rows.push_back({{"R", number(r.R)}, {"C", number(r.C.value)}, {"error", number(r.error)},
                      {"error_estimate", number(r.C.error_estimate)}});
    limits.push_back({{"chart", t.chart}, {"coords", numbers(t.coords)}, {"target", number(t.target)},
                      {"rows", std::move(rows)}});
  }
  j["limits"] = std::move(limits);

  ordered_json checks = ordered_json::object();
  for (const auto& c : report.checks) {
    ordered_json e{{"value", number(c.value)}, {"tolerance", number(c.tolerance)}, {"pass", c.pass}};
    if (c.skipped) e["skipped"] = true;
    if (c.expected_failure) e["expected_failure"] = true;
    if (!c.note.empty()) e["note"] = c.note;
    checks[c.name] = std::move(e);
  }
  j["checks"] = std::move(checks);
  j["verdict"] = report.passed() ? "pass" : "fail";
  j["notes"] = report.notes;
  j["seed"] = std::to_string(config.options.seed);
  return j;
}

}  // namespace eqloc::cli
