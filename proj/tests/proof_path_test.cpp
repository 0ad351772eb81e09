#include <doctest.h>

#include <cmath>

#include "eqloc/models.hpp"
#include "eqloc/proof_path.hpp"
#include "oracles.hpp"

namespace eqloc::test {

TEST_CASE("graph integral does not depend on R") {
  const Model m = models::build("sphere");
  const std::vector<double> schedule{0.0, 0.5, 2.0};
  const auto family = deformation_invariance(m, schedule);
  REQUIRE(family.rows.size() == 3);
  CHECK(family.rows[0].I.value == doctest::Approx(kSphereLhs).epsilon(1e-12));
  CHECK(family.max_relative_residual() <= 1e-6);
  CHECK_THROWS(deformation_invariance(m, std::vector<double>{0.5, 1.0}));
  CHECK_THROWS(deformation_invariance(m, std::vector<double>{0.0, 1.0, 1.0}));
}

TEST_CASE("chain frame at t = 0 is the zero section plus the vertical section") {
  const Model m = models::build("sphere");
  const std::vector<double> x{1.2, 0.5};
  const ChainFrame f = chain_frame(m.integration, x, 0.0);
  REQUIRE(f.vectors.size() == 3);
  CHECK(f.point == std::vector<double>{1.2, 0.5, 0.0, 0.0});
  CHECK(f.vectors[0] == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  CHECK(f.vectors[1] == std::vector<double>{0.0, 1.0, 0.0, 0.0});
  CHECK(f.vectors[2][3] == doctest::Approx(-std::sin(1.2) * std::sin(1.2)).epsilon(1e-15));
}

TEST_CASE("d(omega_[n]) vanishes on chain frames at t = 0") {
  for (const char* name : {"sphere", "sphere_exp", "sphere_scaled:7", "s2xs2"}) {
    const Model m = models::build(name);
    const KForm chain = chain_form(m.integration);
    for (const auto& x : interior_samples(m.integration.chart, m.dim() == 2 ? 5 : 2))
      CHECK(frame_residual(chain, chain_frame(m.integration, x, 0.0)) <= 1e-8);
  }
}

TEST_CASE("lemma residual by mode, and on the stretched-metric control") {
  const Model m = models::build("sphere");
  CHECK(lemma_zero_residual(m, 2.0, 200) <= 1e-8);
  CHECK(lemma_zero_residual(m, 2.0, 200, 0, Differentiation::finite(1e-5)) <= 1e-4);
  CHECK(lemma_zero_residual(m, 2.0, 50, 7) == lemma_zero_residual(m, 2.0, 50, 7));
  CHECK(lemma_zero_residual(models::build("control_noninvariant_metric"), 2.0, 200) >= 1e-3);
}

TEST_CASE("cubes must fit inside their charts") {
  const Model m = models::build("sphere");
  const auto points = fixed_point_records(m);
  const CubeRegion cubes = make_cubes(m, points, 0.3);
  REQUIRE(cubes.cubes.size() == 2);
  CHECK(cubes.cubes[0].box()[0].lo == doctest::Approx(-0.3));
  CHECK_THROWS_AS(make_cubes(m, points, 0.8), CubeError);
}

TEST_CASE("cubes and tail partition the graph integral") {
  const Model m = models::build("sphere");
  const auto points = fixed_point_records(m);
  const CubeRegion cubes = make_cubes(m, points, 0.3);
  const std::vector<double> R{0.0, 3.0};
  const TailTable tail = tail_decay(m, cubes, R);
  for (std::size_t i = 0; i < R.size(); ++i) {
    double sum = tail.rows[i].T.value;
    for (const auto& p : points) {
      const auto table = fixed_point_limit(m, p, cubes, std::vector<double>{R[i]});
      sum += table.rows[0].C.value;
    }
    CHECK(sum == doctest::Approx(kSphereLhs).epsilon(1e-12));
  }
  CHECK(tail.delta_sq >= std::sin(0.3) * std::sin(0.3));
}

TEST_CASE("pole contributions approach 2 pi") {
  const Model m = models::build("sphere");
  const auto points = fixed_point_records(m);
  const CubeRegion cubes = make_cubes(m, points, 0.3);
  const auto table = fixed_point_limit(m, points[0], cubes, std::vector<double>{25.0, 100.0});
  CHECK(table.target == doctest::Approx(kPoleLimit).epsilon(1e-14));
  CHECK(table.rows[1].error < table.rows[0].error);
  CHECK(table.rows[1].error / kPoleLimit <= 0.02);
}

TEST_CASE("proof path on a zero-free model and a non-closed control") {
  const VerificationReport torus = verify_all(models::build("torus_translate"));
  CHECK(torus.passed());
  CHECK(torus.check("tail_decay")->note == "tail integral vanishes");
  const VerificationReport nonclosed = verify_all(models::build("control_nonclosed"));
  CHECK(nonclosed.passed());
  for (const char* name : {"deformation_invariance", "lemma1", "tail_decay", "gaussian_limit"})
    CHECK(nonclosed.check(name)->skipped);
}

TEST_CASE("slow localization is measured on a stretched R scale") {
  const Model m = models::build("sphere_scaled:0.5");
  CHECK(m.decay_scale == 4.0);
  VerifyOptions o;
  o.limit_schedule = {50.0, 100.0};
  o.tail_schedule = {10.0, 20.0};
  const VerificationReport r = verify_all(m, o);
  CHECK(r.passed());
  CHECK(r.tail.back().R == 80.0);
  CHECK(r.notes.size() == 1);
}

}  // namespace eqloc::test
