#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

namespace eqloc::test {

TEST_CASE("frozen reference values reproduce their oracles") {
  CHECK(std::abs(sphere_oracle() - kSphereLhs) <= 1e-12);
  CHECK(std::abs(sphere_exp_oracle() - kSphereExpLhs) <= 1e-12);
  CHECK(std::abs(sphere_oracle() * sphere_oracle() - kS2xS2Lhs) <= 1e-10);
  CHECK(kTorusArea == 4.0 * std::numbers::pi * std::numbers::pi);
  CHECK(kPoleLimit == 2.0 * std::numbers::pi);
}

}  // namespace eqloc::test
