#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace revival {

/// Physical unit of an uncertainty value. Planck's constant is carried
/// symbolically: `hbar_per_meter` means value·ħ/m, `hbar` means value·ħ.
enum class Unit { meter, radian, hbar_per_meter, hbar };

enum class Method { analytic, quadrature, fitted, monte_carlo };

std::string_view to_string(Unit unit);
std::string_view to_string(Method method);

struct FitDiagnostics {
  double residual_norm = 0.0;  ///< sqrt(sum of squared residuals)
  int iterations = 0;
  int rank = 0;  ///< numerical rank of the Jacobian at the solution
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
  Eigen::MatrixXd covariance;  ///< s²·(JᵀJ)⁺ in the named parameters
};

struct UncertaintyEstimate {
  double value = 0.0;
  Unit unit = Unit::meter;
  Method method = Method::analytic;
  double z = 0.0;
  std::optional<FitDiagnostics> diagnostics;  ///< set iff method == fitted
  std::optional<double> standard_error;       ///< set for monte_carlo
  bool saturated = false;  ///< half-maximum level never reached
};

}  // namespace revival
