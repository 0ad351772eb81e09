#include "eqloc/models.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace eqloc::models {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStretch = 0.3;     // ellipsoidal control
constexpr double kPoleExtent = 0.7;  // pole charts cover |x|, |y| < 0.7

// g = J^T J for an embedding E: R^n -> R^k.
Metric induced_metric(const Function& E) {
  const int n = E.in_dim();
  const int k = E.out_dim();
  return Metric(Function(
      n, n * n,
      [E, n, k]<class S>(std::span<const S> x, std::span<S> g) {
        Scratch<S, kMaxDim * kMaxDim> J;
        Scratch<S, kMaxDim> column;
        for (int j = 0; j < n; ++j) {
          partial<S>(E, x, j, column.first(static_cast<std::size_t>(k)), Differentiation{});
          for (int i = 0; i < k; ++i) J.data[static_cast<std::size_t>(i * n + j)] = column.data[static_cast<std::size_t>(i)];
        }
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            S acc(0.0);
            for (int i = 0; i < k; ++i)
              acc += J.data[static_cast<std::size_t>(i * n + a)] * J.data[static_cast<std::size_t>(i * n + b)];
            g[static_cast<std::size_t>(a * n + b)] = acc;
          }
      },
      E.max_order() - 1));
}

MixedForm with_exponential(const MixedForm& alpha, bool exponential) {
  return exponential ? exp_even(alpha) : alpha;
}

Interval iv(double lo, double hi) { return {lo, hi}; }

}  // namespace

ChartData sphere_polar(const SphereOptions& o) {
  const double c = o.c;
  ChartData d;
  d.chart = Chart{"polar", 2, {iv(0.0, kPi), iv(0.0, 2.0 * kPi)}, 1, true};
  if (o.ellipsoidal) {
    d.metric = induced_metric(Function(2, 3, []<class S>(std::span<const S> x, std::span<S> e) {
      const S st = sin(x[0]);
      e[0] = st * cos(x[1]);
      e[1] = (1.0 + kStretch * st * st) * st * sin(x[1]);
      e[2] = cos(x[0]);
    }));
  } else {
    d.metric = Metric(Function(2, 4, []<class S>(std::span<const S> x, std::span<S> g) {
      const S st = sin(x[0]);
      g[0] = S(1.0);
      g[1] = S(0.0);
      g[2] = S(0.0);
      g[3] = st * st;
    }));
  }
  d.field = VectorField(Function(2, 2, [c]<class S>(std::span<const S>, std::span<S> v) {
    v[0] = S(0.0);
    v[1] = S(c);
  }));
  const KForm h = KForm::scalar(2, Function(2, 1, [c]<class S>(std::span<const S> x, std::span<S> y) { y[0] = c * cos(x[0]); }));
  const KForm area(2, 2, Function(2, 1, []<class S>(std::span<const S> x, std::span<S> y) { y[0] = sin(x[0]); }));
  d.alpha = with_exponential(MixedForm(h).with(area), o.exponential);
  d.flow = Function(3, 2, [c]<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[1];
    y[1] = x[2] - c * x[0];
  });
  return d;
}

ChartData sphere_pole(const SphereOptions& o, int side) {
  const double c = o.c;
  const double s = side > 0 ? 1.0 : -1.0;
  ChartData d;
  d.chart = Chart{side > 0 ? "north" : "south", 2, {iv(-kPoleExtent, kPoleExtent), iv(-kPoleExtent, kPoleExtent)},
                  side > 0 ? 1 : -1, false};
  if (o.ellipsoidal) {
    d.metric = induced_metric(Function(2, 3, [s]<class S>(std::span<const S> x, std::span<S> e) {
      const S r2 = x[0] * x[0] + x[1] * x[1];
      e[0] = x[0];
      e[1] = (1.0 + kStretch * r2) * x[1];
      e[2] = s * sqrt(1.0 - r2);
    }));
  } else {
    d.metric = Metric(Function(2, 4, []<class S>(std::span<const S> x, std::span<S> g) {
      const S q = 1.0 / (1.0 - x[0] * x[0] - x[1] * x[1]);
      g[0] = 1.0 + x[0] * x[0] * q;
      g[1] = x[0] * x[1] * q;
      g[2] = g[1];
      g[3] = 1.0 + x[1] * x[1] * q;
    }));
  }
  d.field = VectorField(Function(2, 2, [c]<class S>(std::span<const S> x, std::span<S> v) {
    v[0] = -c * x[1];
    v[1] = c * x[0];
  }));
  const KForm h = KForm::scalar(2, Function(2, 1, [c, s]<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = s * c * sqrt(1.0 - x[0] * x[0] - x[1] * x[1]);
  }));
  const KForm area(2, 2, Function(2, 1, [s]<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = s / sqrt(1.0 - x[0] * x[0] - x[1] * x[1]);
  }));
  d.alpha = with_exponential(MixedForm(h).with(area), o.exponential);
  d.flow = Function(3, 2, [c]<class S>(std::span<const S> x, std::span<S> y) {
    const S ct = cos(c * x[0]);
    const S st = sin(c * x[0]);
    y[0] = ct * x[1] + st * x[2];
    y[1] = ct * x[2] - st * x[1];
  });
  return d;
}

std::vector<Function> sphere_tail_cells(double eps) {
  if (!(eps > 0.0) || eps >= kPoleExtent) throw ModelError("sphere: cube half-width must lie in (0, 0.7)");
  std::vector<Function> cells;
  for (int k = 0; k < 8; ++k) {
    // On this wedge max(|cos phi|, |sin phi|) is one signed branch.
    const double mid = (k + 0.5) * kPi / 4.0;
    const bool use_cos = std::abs(std::cos(mid)) >= std::abs(std::sin(mid));
    const double sign = use_cos ? (std::cos(mid) > 0 ? 1.0 : -1.0) : (std::sin(mid) > 0 ? 1.0 : -1.0);
    cells.emplace_back(2, 2, [k, use_cos, sign, eps]<class S>(std::span<const S> u, std::span<S> y) {
      const S phi = (k + u[1]) * (kPi / 4.0);
      const S m = sign * (use_cos ? cos(phi) : sin(phi));
      const S edge = asin(eps / m);
      y[0] = edge + u[0] * (kPi - 2.0 * edge);
      y[1] = phi;
    });
  }
  return cells;
}

ChartData torus_chart(const MixedForm& alpha) {
  ChartData d;
  d.chart = Chart{"flat", 2, {iv(0.0, 2.0 * kPi), iv(0.0, 2.0 * kPi)}, 1, true};
  d.metric = Metric(Function(2, 4, []<class S>(std::span<const S>, std::span<S> g) {
    g[0] = S(1.0);
    g[1] = S(0.0);
    g[2] = S(0.0);
    g[3] = S(1.0);
  }));
  d.field = VectorField(Function(2, 2, []<class S>(std::span<const S>, std::span<S> v) {
    v[0] = S(1.0);
    v[1] = S(0.0);
  }));
  d.alpha = alpha;
  d.flow = Function(3, 2, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = x[1] - x[0];
    y[1] = x[2];
  });
  return d;
}

ChartData product(const ChartData& a, const ChartData& b) {
  const int na = a.chart.dim;
  const int nb = b.chart.dim;
  const int n = na + nb;
  ChartData d;
  d.chart.name = a.chart.name + "*" + b.chart.name;
  d.chart.dim = n;
  d.chart.bounds = a.chart.bounds;
  d.chart.bounds.insert(d.chart.bounds.end(), b.chart.bounds.begin(), b.chart.bounds.end());
  d.chart.orientation = a.chart.orientation * b.chart.orientation;
  d.chart.covers_almost_all = a.chart.covers_almost_all && b.chart.covers_almost_all;

  const Function ga = a.metric.components();
  const Function gb = b.metric.components();
  d.metric = Metric(Function(
      n, n * n,
      [ga, gb, na, nb, n]<class S>(std::span<const S> x, std::span<S> g) {
        Scratch<S, kMaxDim * kMaxDim> pa, pb;
        ga(x.first(static_cast<std::size_t>(na)), pa.first(static_cast<std::size_t>(na * na)));
        gb(x.subspan(static_cast<std::size_t>(na)), pb.first(static_cast<std::size_t>(nb * nb)));
        for (auto& v : g) v = S(0.0);
        for (int i = 0; i < na; ++i)
          for (int j = 0; j < na; ++j) g[static_cast<std::size_t>(i * n + j)] = pa.data[static_cast<std::size_t>(i * na + j)];
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j)
            g[static_cast<std::size_t>((na + i) * n + na + j)] = pb.data[static_cast<std::size_t>(i * nb + j)];
      },
      std::min(ga.max_order(), gb.max_order())));

  const Function va = a.field.components();
  const Function vb = b.field.components();
  d.field = VectorField(Function(
      n, n,
      [va, vb, na]<class S>(std::span<const S> x, std::span<S> v) {
        va(x.first(static_cast<std::size_t>(na)), v.first(static_cast<std::size_t>(na)));
        vb(x.subspan(static_cast<std::size_t>(na)), v.subspan(static_cast<std::size_t>(na)));
      },
      std::min(va.max_order(), vb.max_order())));

  d.alpha = wedge(extend(a.alpha, n), extend(b.alpha, n, na));

  if (a.flow && b.flow) {
    const Function fa = *a.flow;
    const Function fb = *b.flow;
    d.flow = Function(
        n + 1, n,
        [fa, fb, na, nb]<class S>(std::span<const S> x, std::span<S> y) {
          Scratch<S, kMaxDim + 1> in;
          in.data[0] = x[0];
          for (int i = 0; i < na; ++i) in.data[static_cast<std::size_t>(i + 1)] = x[static_cast<std::size_t>(i + 1)];
          fa(in.cfirst(static_cast<std::size_t>(na + 1)), y.first(static_cast<std::size_t>(na)));
          for (int i = 0; i < nb; ++i) in.data[static_cast<std::size_t>(i + 1)] = x[static_cast<std::size_t>(na + i + 1)];
          fb(in.cfirst(static_cast<std::size_t>(nb + 1)), y.subspan(static_cast<std::size_t>(na)));
        },
        std::min(fa.max_order(), fb.max_order()));
  }
  return d;
}

namespace {

Model sphere_model(std::string name, const SphereOptions& o) {
  Model m;
  m.name = std::move(name);
  m.integration = sphere_polar(o);
  m.fixed_point_charts = {sphere_pole(o, 1), sphere_pole(o, -1)};
  m.half_dim = 1;
  m.tail_cells = sphere_tail_cells;
  return m;
}

Model sphere() {
  Model m = sphere_model("sphere", {});
  m.description = "unit sphere, X = d/dphi, alpha = cos(theta) + sin(theta) dtheta^dphi";
  m.expected_lhs = 4.0 * kPi;
  m.provenance = "integral of sin(theta) over (0,pi) x (0,2pi)";
  return m;
}

Model sphere_scaled(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ModelError("sphere_scaled: scale factor must be positive");
  SphereOptions o;
  o.c = c;
  char buf[64];
  std::snprintf(buf, sizeof buf, "sphere_scaled:%.17g", c);
  Model m = sphere_model(buf, o);
  m.description = "unit sphere, X = c d/dphi, alpha = c cos(theta) + sin(theta) dtheta^dphi";
  m.expected_lhs = 4.0 * kPi;
  m.provenance = "degree-2 part is independent of c";
  // The graph integrand is exp(-R c^2 sin^2(theta)); keep R c^2 >= R.
  if (c < 1.0) m.decay_scale = 1.0 / (c * c);
  return m;
}

Model sphere_exp() {
  SphereOptions o;
  o.exponential = true;
  Model m = sphere_model("sphere_exp", o);
  m.description = "unit sphere, alpha = exp(cos(theta) + sin(theta) dtheta^dphi)";
  m.expected_lhs = 2.0 * kPi * (std::exp(1.0) - std::exp(-1.0));
  m.provenance = "integral of exp(cos t) sin t over (0,pi) is e - 1/e";
  return m;
}

Model s2xs2() {
  const SphereOptions o;
  Model m;
  m.name = "s2xs2";
  m.description = "product of two unit spheres, X = d/dphi1 + d/dphi2, alpha = product of sphere forms";
  m.integration = product(sphere_polar(o), sphere_polar(o));
  for (int a : {1, -1})
    for (int b : {1, -1}) m.fixed_point_charts.push_back(product(sphere_pole(o, a), sphere_pole(o, b)));
  m.half_dim = 2;
  m.expected_lhs = 16.0 * kPi * kPi;
  m.provenance = "product of two sphere integrals";
  return m;
}

Model torus_translate() {
  Model m;
  m.name = "torus_translate";
  m.description = "flat torus, X = d/dx without zeros, alpha = 1";
  m.integration = torus_chart(MixedForm(KForm::constant(2, 0, {1.0})));
  m.half_dim = 1;
  m.tail_cells = [](double) { return std::vector<Function>{}; };  // no cubes: the whole chart
  m.expected_lhs = 0.0;
  m.provenance = "alpha has no degree-2 part";
  return m;
}

Model control_nonclosed() {
  Model m;
  m.name = "control_nonclosed";
  m.description = "negative control: flat torus with alpha = dx^dy, not equivariantly closed";
  m.integration = torus_chart(MixedForm(KForm::constant(2, 2, {1.0})));
  m.half_dim = 1;
  m.tail_cells = [](double) { return std::vector<Function>{}; };
  m.expected_lhs = 4.0 * kPi * kPi;
  m.provenance = "area of the flat torus";
  m.expected_failures = {"closedness"};
  return m;
}

Model control_noninvariant_metric() {
  SphereOptions o;
  o.ellipsoidal = true;
  Model m = sphere_model("control_noninvariant_metric", o);
  m.description = "negative control: sphere data with a metric that the rotation does not preserve";
  m.expected_lhs = 4.0 * kPi;
  m.provenance = "integral of sin(theta); the form does not depend on the metric";
  m.expected_failures = {"metric_invariance", "lemma1", "deformation_invariance"};
  return m;
}

}  // namespace

std::vector<Entry> registry() {
  return {
      {"sphere", "unit sphere with the height function; both sides 4 pi"},
      {"sphere_scaled", "sphere with X scaled by c (sphere_scaled:<c>, default c = 2); both sides 4 pi"},
      {"sphere_exp", "exponential of the sphere form; both sides 2 pi (e - 1/e)"},
      {"s2xs2", "product of two spheres, n = 4; both sides 16 pi^2"},
      {"torus_translate", "translation on the flat torus, no zeros; both sides 0"},
      {"control_nonclosed", "control: alpha not equivariantly closed; fails closedness"},
      {"control_noninvariant_metric", "control: metric not invariant; fails metric invariance and the proof path"},
  };
}

Model build(const std::string& name) {
  Model m;
  if (name == "sphere") {
    m = sphere();
  } else if (name == "sphere_scaled") {
    m = sphere_scaled(2.0);
  } else if (name.rfind("sphere_scaled:", 0) == 0) {
    const std::string arg = name.substr(std::string("sphere_scaled:").size());
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw ModelError("sphere_scaled: cannot parse scale factor '" + arg + "'");
    m = sphere_scaled(c);
  } else if (name == "sphere_exp") {
    m = sphere_exp();
  } else if (name == "s2xs2") {
    m = s2xs2();
  } else if (name == "torus_translate") {
    m = torus_translate();
  } else if (name == "control_nonclosed") {
    m = control_nonclosed();
  } else if (name == "control_noninvariant_metric") {
    m = control_noninvariant_metric();
  } else {
    throw ModelError("unknown model: " + name);
  }
  validate(m);
  return m;
}

}  // namespace eqloc::models
