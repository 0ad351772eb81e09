#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eqloc/models.hpp"
#include "eqloc/quadrature.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace eqloc::test {

TEST_CASE("Gauss-Legendre rules are exact to degree 2m - 1") {
  for (int m : {1, 2, 3, 5, 8, 13, 32, 64}) {
    const auto& rule = gauss_legendre(m);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(m));
    double wsum = 0.0;
    for (int i = 0; i < m; ++i) {
      CHECK(rule.weights[i] > 0.0);
      CHECK(rule.nodes[i] == doctest::Approx(-rule.nodes[m - 1 - i]).epsilon(1e-15));
      if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      wsum += rule.weights[i];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= 2 * m - 1; ++k) {
      double q = 0.0;
      for (int i = 0; i < m; ++i) q += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = k % 2 == 0 ? 2.0 / (k + 1) : 0.0;
      CHECK(std::abs(q - exact) <= 1e-14);
    }
  }
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("tensor grids carry the box volume") {
  const auto grid = QuadratureGrid::make({{0.0, 1.0}, {-2.0, 3.0}, {0.5, 0.75}}, 6);
  CHECK(grid.size() == 216);
  CHECK(grid.weight_sum() == doctest::Approx(grid.volume()).epsilon(1e-14));
  CHECK(grid.volume() == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("closed-form integrals and the orientation sign") {
  const KForm f(2, 2, Function(2, 1, []<class S>(std::span<const S> x, std::span<S> y) { y[0] = exp(x[0] + x[1]); }));
  Chart chart{"box", 2, {{0.0, 1.0}, {0.0, 2.0}}, 1, false};
  const double exact = (std::exp(1.0) - 1.0) * (std::exp(2.0) - 1.0);
  QuadratureOptions q;
  q.nodes = 16;
  const auto r = integrate_top_form(f, chart, q);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
  CHECK(r.error_estimate <= 1e-12);
  CHECK(r.nodes_used == 16 * 16 + 32 * 32);
  chart.orientation = -1;
  CHECK(integrate_top_form(f, chart, q).value == -r.value);
  const KForm area(2, 2, Function(2, 1, []<class S>(std::span<const S> x, std::span<S> y) { y[0] = sin(x[0]); }));
  Chart polar{"polar", 2, {{0.0, std::numbers::pi}, {0.0, 2.0 * std::numbers::pi}}, 1, true};
  CHECK(integrate_top_form(area, polar).value == doctest::Approx(kSphereLhs).epsilon(1e-14));
  CHECK_THROWS_AS(integrate_top_form(KForm::basis(2, {{0}}), chart), DimensionError);
}

TEST_CASE("Stokes theorem on a box") {
  // beta = P dx + Q dy, d beta = (Q_x - P_y) dx ^ dy
  const double a = -0.3, b = 1.1, c = 0.2, d = 1.7;
  auto P = [](double x, double y) { return std::sin(x * y) + y * y * x; };
  auto Q = [](double x, double y) { return std::exp(0.5 * x) * std::cos(y) - x * x * y; };
  const KForm beta(2, 1, Function(2, 2, []<class S>(std::span<const S> x, std::span<S> y) {
    y[0] = sin(x[0] * x[1]) + x[1] * x[1] * x[0];
    y[1] = exp(0.5 * x[0]) * cos(x[1]) - x[0] * x[0] * x[1];
  }));
  const KForm dbeta = *exterior_derivative(beta);
  const Chart box{"box", 2, {{a, b}, {c, d}}, 1, false};
  QuadratureOptions q;
  q.nodes = 24;
  const double interior = integrate_top_form(dbeta, box, q).value;
  const double boundary = simpson([&](double x) { return P(x, c); }, a, b) +
                          simpson([&](double y) { return Q(b, y); }, c, d) -
                          simpson([&](double x) { return P(x, d); }, a, b) -
                          simpson([&](double y) { return Q(a, y); }, c, d);
  CHECK(std::abs(interior - boundary) <= 1e-10);
}

TEST_CASE("summation does not depend on the worker count") {
  const ChartData d = models::sphere_polar({});
  const KForm form = graph_form(d, 3.0);
  const auto grid = QuadratureGrid::make(d.chart.bounds, 48);
  const double one = sum_top_form(form, grid, 1);
  for (int k : {2, 3, 8}) CHECK(sum_top_form(form, grid, k) == one);
}

TEST_CASE("graph pullback agrees with the closed-form integrand") {
  std::mt19937_64 rng(61);
  for (const char* name : {"sphere", "sphere_exp", "control_noninvariant_metric", "s2xs2"}) {
    const Model m = models::build(name);
    const ChartData& d = m.integration;
    for (double R : {0.0, 0.7, 4.0}) {
      const KForm pulled = graph_form(d, R);
      const KForm closed = graph_form_closed(d, R);
      for (int i = 0; i < 5; ++i) {
        std::vector<double> p;
        for (const auto& iv : d.chart.bounds) p.push_back(iv.lo + (0.1 + 0.8 * uniform(rng, 1, 0.0, 1.0)[0]) * iv.width());
        const double x = pulled(p)[0];
        const double y = closed(p)[0];
        CHECK(std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)));
      }
    }
  }
}

TEST_CASE("graph section sits on the metric dual of -X") {
  const ChartData d = models::sphere_polar({});
  const Function s = graph_section(d, 2.5);
  const std::vector<double> p{1.0, 0.4};
  const auto y = s(p);
  REQUIRE(y.size() == 4);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 0.4);
  CHECK(y[2] == doctest::Approx(0.0));
  CHECK(y[3] == doctest::Approx(-2.5 * std::sin(1.0) * std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("node schedules") {
  CHECK(default_nodes(2) == 32);
  CHECK(default_nodes(4) == 16);
  CHECK(node_schedule(0.0) == 32);
  CHECK(node_schedule(5.0) == 80);
  CHECK(node_schedule(100.0) == 324);
  CHECK(node_schedule(5.0, 4) == 16);
  CHECK(node_schedule(100.0, 4) == 60);
  CHECK(cell_node_schedule(20.0, 0.5) == 56);
  CHECK(cell_node_schedule(20.0, 40.0) == cell_node_schedule(20.0, 1.0));
  CHECK_THROWS_AS(node_schedule(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_graph(models::build("sphere"), -0.5), std::invalid_argument);
}

TEST_CASE("box cells integrate their image") {
  const KForm one = KForm::constant(2, 2, {1.0});
  const Chart chart{"box", 2, {{0.0, 4.0}, {0.0, 4.0}}, 1, false};
  Region region;
  region.cells.push_back(box_cell({{1.0, 2.0}, {0.5, 3.5}}));
  region.cells.push_back(box_cell({{2.0, 4.0}, {0.0, 1.0}}));
  QuadratureOptions q;
  q.nodes = 4;
  CHECK(integrate_over_region(one, chart, region, q).value == doctest::Approx(5.0).epsilon(1e-14));
}

}  // namespace eqloc::test
