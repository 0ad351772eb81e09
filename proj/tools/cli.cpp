#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqloc/models.hpp"
#include "eqloc/proof_path.hpp"
#include "report.hpp"

namespace eqloc::cli {

namespace {

struct Flags {
  std::string model;
  int nodes = 0;
  double eps = 0.3;
  std::vector<double> r_schedule;
  std::optional<double> rel_tol;
  std::uint64_t seed = 0;
  std::string report_path;
  bool fd_fallback = false;
  int parallel = 1;
};

void add_run_options(CLI::App* sub, Flags& f) {
  sub->add_option("model", f.model, "model name (see `eqloc list`)")->required();
  sub->add_option("--nodes", f.nodes, "Gauss-Legendre nodes per axis for every integral; 0 uses the schedules")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--eps", f.eps, "half-width of the cubes around fixed points")->check(CLI::PositiveNumber);
  sub->add_option("--r-schedule", f.r_schedule, "deformation parameters a,b,c (0 is prepended)")
      ->delimiter(',');
  sub->add_option("--rel-tol", f.rel_tol, "relative tolerance of the lhs/rhs comparison")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", f.seed, "seed of the chain sampling");
  sub->add_option("--report", f.report_path, "write the report here instead of stdout");
  sub->add_flag("--fd-fallback", f.fd_fallback, "central differences instead of dual numbers");
  sub->add_option("--parallel", f.parallel, "worker threads")->check(CLI::PositiveNumber);
}

VerifyOptions to_options(const Flags& f) {
  VerifyOptions o;
  o.nodes = f.nodes;
  o.eps = f.eps;
  o.rel_tol = f.rel_tol;
  o.seed = f.seed;
  o.parallel = f.parallel;
  if (f.fd_fallback) o.diff = Differentiation::finite(1e-5);
  if (!f.r_schedule.empty()) {
    std::vector<double> s = f.r_schedule;
    for (double R : s)
      if (!(R >= 0.0)) throw CLI::ValidationError("--r-schedule", "values must be nonnegative");
    if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
      throw CLI::ValidationError("--r-schedule", "values must increase strictly");
    if (s.front() > 0.0) s.insert(s.begin(), 0.0);
    o.invariance_schedule = std::move(s);
  }
  return o;
}

void print_summary(const VerificationReport& r, std::ostream& out) {
  out << "model " << r.model << "\n";
  out << "lhs   " << number(r.lhs.value) << "  (error estimate " << number(r.lhs.error_estimate) << ")\n";
  out << "rhs   " << number(r.rhs) << "  (" << r.fixed_points.size() << " fixed points)\n";
  for (const auto& c : r.checks) {
    const char* state = c.skipped ? "skip" : c.pass ? "pass" : "FAIL";
    char line[160];
    std::snprintf(line, sizeof line, "  %-4s %-22s %-12.4g tol %-10.4g%s\n", state, c.name.c_str(), c.value,
                  c.tolerance, c.expected_failure ? "  (expected failure)" : "");
    out << line;
  }
  out << (r.passed() ? "verdict: pass\n" : "verdict: FAIL\n");
}

int list_models(std::ostream& out) {
  for (const auto& e : models::registry()) {
    char line[200];
    std::snprintf(line, sizeof line, "%-28s %s\n", e.name.c_str(), e.summary.c_str());
    out << line;
  }
  return 0;
}

int run_model(const std::string& command, const Flags& f, std::ostream& out, std::ostream& err) {
  RunConfig config{command, to_options(f)};
  Model model;
  try {
    model = models::build(f.model);
  } catch (const ModelError& e) {
    err << "eqloc: " << e.what() << "\n";
    return 2;
  }

  VerificationReport report;
  try {
    config.options.proof_path = command != "localize";
    report = verify_all(model, config.options);
  } catch (const CubeError& e) {
    err << "eqloc: " << e.what() << "\n";
    return 2;
  }
  if (command == "proofpath")
    std::erase_if(report.checks, [](const Check& c) { return c.name == "theorem"; });

  const std::string text = report_json(report, config).dump(2) + "\n";
  if (f.report_path.empty()) {
    out << text;
  } else {
    std::ofstream file(f.report_path, std::ios::binary);
    if (!file) {
      err << "eqloc: cannot write " << f.report_path << "\n";
      return 2;
    }
    file << text;
    print_summary(report, out);
  }
  return report.passed() ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks of equivariant localization on built-in models"};
  app.name("eqloc");
  app.require_subcommand(1);
  Flags flags;
  auto* list = app.add_subcommand("list", "print the model registry");
  auto* localize = app.add_subcommand("localize", "hypotheses and both sides of the formula");
  auto* proofpath = app.add_subcommand("proofpath", "hypotheses and the deformation suite");
  auto* verify = app.add_subcommand("verify", "everything");
  for (auto* sub : {localize, proofpath, verify}) add_run_options(sub, flags);

  try {
    app.parse(argc, argv);
    if (list->parsed()) return list_models(out);
    for (auto* sub : {localize, proofpath, verify})
      if (sub->parsed()) return run_model(sub->get_name(), flags, out, err);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "eqloc: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace eqloc::cli
