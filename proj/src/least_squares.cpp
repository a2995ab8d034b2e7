#include "least_squares.hpp"

namespace revival::detail {

void fill_covariance(const Eigen::MatrixXd& jacobian, double ssr, FitDiagnostics& diag) {
  const Eigen::Index n = jacobian.rows();
  const Eigen::Index p = jacobian.cols();
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = jacobian.col(j).norm();
    scale(j) = norm > 0.0 ? 1.0 / norm : 0.0;
  }
  const Eigen::MatrixXd scaled = jacobian * scale.asDiagonal();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(scaled);
  cod.setThreshold(1e-9);
  diag.rank = static_cast<int>(cod.rank());
  const double s2 = n > p ? ssr / static_cast<double>(n - p) : ssr;
  const Eigen::MatrixXd normal = scaled.transpose() * scaled;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> inv(normal);
  inv.setThreshold(1e-12);
  diag.covariance = s2 * scale.asDiagonal() * inv.pseudoInverse() * scale.asDiagonal();
}

}  // namespace revival::detail
