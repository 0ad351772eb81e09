#pragma once

// The cotangent-bundle deformation argument, step by step: the integral
// over the graph of R s does not depend on R, d(omega_[n]) vanishes on the
// deformation chain, the mass outside small cubes around the zeros decays
// exponentially in R, and each cube contributes its local term in the limit.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eqloc/localization.hpp"

namespace eqloc {

struct DeformationFamily {
  std::vector<DeformationRow> rows;

  // max |I(R) - I(0)| / |I(0)|; absolute when |I(0)| <= abs_floor.
  double max_relative_residual(double abs_floor = 1e-9) const;
};

// Graph integrals on the integration chart. The schedule must start at 0
// and increase strictly.
DeformationFamily deformation_invariance(const Model& model, std::span<const double> schedule,
                                         const QuadratureOptions& options = {});

// Tangent frame of the chain {t s(m)} at (m, t): the n columns of the
// Jacobian of m -> (m, t s(m)) and the vertical vector (0, s(m)).
struct ChainFrame {
  Point base;
  double t = 0.0;
  Point point;  // (m, t s(m)) in cotangent coordinates
  std::vector<TangentVector> vectors;
};

ChainFrame chain_frame(const ChartData& data, std::span<const double> m, double t,
                       const Differentiation& diff = {});

// d(omega_[n]) on the cotangent chart.
KForm chain_form(const ChartData& data, const Differentiation& diff = {});

// |d(omega_[n])(frame)| divided by the Gram volume of the frame.
double frame_residual(const KForm& chain, const ChainFrame& frame);

// Max frame residual over `samples` pairs (m, t): m a random node of the
// default quadrature grid on the integration chart, t uniform in [0, R].
double lemma_zero_residual(const Model& model, double R, int samples, std::uint64_t seed = 0,
                           const Differentiation& diff = {});

struct Cube {
  std::string chart;
  Point center;
  double eps = 0.0;
  std::vector<Interval> box() const;
};

struct CubeRegion {
  double eps = 0.0;
  std::vector<Cube> cubes;
};

class CubeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One cube |x - p| <= eps (sup norm) per fixed point, in the point's chart.
CubeRegion make_cubes(const Model& model, const std::vector<FixedPointRecord>& points, double eps);

struct TailTable {
  std::vector<TailRow> rows;  // signed integrals; T(R) is the absolute value
  double delta_sq = 0.0;      // min |X|^2 over sample nodes of the region
};

TailTable tail_decay(const Model& model, const CubeRegion& cubes, std::span<const double> schedule,
                     const QuadratureOptions& options = {});

LimitTable fixed_point_limit(const Model& model, const FixedPointRecord& point, const CubeRegion& cubes,
                             std::span<const double> schedule, const QuadratureOptions& options = {});

// Appends the proof-path tables and checks to a report from verify().
void run_proof_path(const Model& model, const VerifyOptions& options, VerificationReport& report);

// verify() followed by run_proof_path() when options.proof_path is set.
VerificationReport verify_all(const Model& model, const VerifyOptions& options = {});

}  // namespace eqloc
