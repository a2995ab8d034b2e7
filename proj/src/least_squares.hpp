#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <ceres/ceres.h>

#include "revival/errors.hpp"
#include "revival/uncertainty.hpp"

namespace revival::detail {

struct Solution {
  std::vector<double> params;
  FitDiagnostics diagnostics;
  Eigen::MatrixXd jacobian;  ///< residuals × parameters at the solution
};

struct SolverLimits {
  int max_iterations = 200;
  double parameter_tolerance = 1e-8;
};

/// Numerical rank and s²·(JᵀJ)⁺ with columns equilibrated first, so that
/// parameters of very different magnitude do not distort the rank test.
void fill_covariance(const Eigen::MatrixXd& jacobian, double ssr, FitDiagnostics& diag);

/// Bounded least squares for a functor with
/// `template <class T> bool operator()(const T* p, T* residuals) const`.
/// Throws FitError when the solver fails or runs out of iterations.
template <int NP, class Functor>
Solution solve_bounded(Functor* functor, int n_residuals, std::array<double, NP> x,
                       const std::array<double, NP>& lower, const std::array<double, NP>& upper,
                       std::vector<std::string> names, const SolverLimits& limits = {}) {
  auto* cost = new ceres::AutoDiffCostFunction<Functor, ceres::DYNAMIC, NP>(
      functor, n_residuals);
  ceres::Problem problem;
  problem.AddResidualBlock(cost, nullptr, x.data());
  for (int i = 0; i < NP; ++i) {
    problem.SetParameterLowerBound(x.data(), i, lower[i]);
    problem.SetParameterUpperBound(x.data(), i, upper[i]);
  }
  ceres::Solver::Options options;
  options.linear_solver_type = ceres::DENSE_QR;
  options.max_num_iterations = limits.max_iterations;
  options.parameter_tolerance = limits.parameter_tolerance;
  options.function_tolerance = 1e-14;
  options.gradient_tolerance = 1e-16;
  options.num_threads = 1;
  options.logging_type = ceres::SILENT;
  ceres::Solver::Summary summary;
  ceres::Solve(options, &problem, &summary);

  const double ssr = 2.0 * summary.final_cost;
  if (summary.termination_type == ceres::FAILURE || summary.termination_type == ceres::NO_CONVERGENCE)
    throw FitError("least-squares fit did not converge: " + summary.message, std::sqrt(ssr));

  Solution out;
  out.params.assign(x.begin(), x.end());
  std::vector<double> residuals;
  ceres::CRSMatrix crs;
  problem.Evaluate(ceres::Problem::EvaluateOptions(), nullptr, &residuals, nullptr, &crs);
  out.jacobian = Eigen::MatrixXd::Zero(crs.num_rows, crs.num_cols);
  for (int r = 0; r < crs.num_rows; ++r)
    for (int k = crs.rows[r]; k < crs.rows[r + 1]; ++k) out.jacobian(r, crs.cols[k]) = crs.values[k];
  FitDiagnostics& diag = out.diagnostics;
  diag.residual_norm = std::sqrt(ssr);
  diag.iterations = static_cast<int>(summary.iterations.size()) - 1;
  diag.parameter_names = std::move(names);
  diag.parameters = out.params;
  fill_covariance(out.jacobian, ssr, diag);
  return out;
}

}  // namespace revival::detail
