#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "revival/uncertainty.hpp"

namespace revival {

/// Discrete distribution over l = −lmax..lmax.
struct OamDistribution {
  int lmax = 0;
  std::vector<double> p;  ///< p[l + lmax]
  bool normalized = false;

  double operator()(int l) const { return p[static_cast<std::size_t>(l + lmax)]; }
  double& operator()(int l) { return p[static_cast<std::size_t>(l + lmax)]; }
  void normalize();
};

enum class OamForm { delta_gaussian, exp_gaussian };

/// S0·δ_{l,0} + N·exp(−l²/(2σ_f²)) or a·exp(−b|l|) + N·exp(−l²/(2σ_f²)).
struct OamNoiseModel {
  OamForm form = OamForm::delta_gaussian;
  double S0 = 0.0;
  double N = 0.0;
  double sigma_f = 1.0;
  double a = 0.0;
  double b = 0.0;

  double operator()(int l) const;
};

/// Model values on −lmax..lmax, not normalized.
OamDistribution model_values(const OamNoiseModel& model, int lmax);

/// Normalized P(l_s | l_i = 0) from either model form. Throws TruncationError
/// when more than 1e-6 of the mass lies beyond lmax.
OamDistribution conditional_oam_clean(const OamNoiseModel& noise, int lmax = 15);

/// Standard deviation of the normalized distribution, in units of ħ.
UncertaintyEstimate oam_uncertainty(const OamDistribution& dist);

struct OamFit {
  OamNoiseModel model;
  FitDiagnostics diagnostics;
};

/// Least squares of the chosen form against the given values. Throws
/// DataError with fewer than 7 nonzero entries and FitError when the
/// Jacobian is rank deficient at the solution.
OamFit fit_oam_model(const OamDistribution& samples, OamForm form);

/// Two-photon joint OAM matrix with weights S_l on the anti-diagonal
/// l_i = −l_s; rows are l_s, columns l_i.
Eigen::MatrixXd clean_joint_oam(const std::vector<double>& spiral_weights, int lmax);

/// CSV `l,probability`.
void write_csv(std::ostream& out, const OamDistribution& dist);

}  // namespace revival
