#include <cmath>
#include <utility>

#include "eqloc/fixed_points.hpp"

namespace eqloc {

double pfaffian(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("pfaffian: matrix must be square");
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;

  double result = 1.0;
  for (Eigen::Index k = 0; k < n - 1; k += 2) {
    // pivot: largest entry below the diagonal in column k
    Eigen::Index kp = k + 1;
    for (Eigen::Index i = k + 2; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(kp, k))) kp = i;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      result = -result;
    }
    const double pivot = a(k, k + 1);
    if (pivot == 0.0) return 0.0;
    result *= pivot;
    if (k + 2 < n) {
      const Eigen::Index rest = n - k - 2;
      const Eigen::VectorXd tau = a.row(k).tail(rest).transpose() / pivot;
      const Eigen::VectorXd col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return result;
}

}  // namespace eqloc
