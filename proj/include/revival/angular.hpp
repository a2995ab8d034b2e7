#pragma once

#include <cstddef>
#include <vector>

#include "revival/grid.hpp"
#include "revival/optics.hpp"
#include "revival/uncertainty.hpp"

namespace revival {

/// Coefficients of the equal-radius angle density P0/[C + D·cos Δθ]^{3/2}.
struct AngleKernelCoeffs {
  double P0 = 0.0;
  double C = 0.0;  ///< ½(1/w_z² + 1/σ_z²)
  double D = 0.0;  ///< ½(1/w_z² − 1/σ_z²); negative in the near field
  double z = 0.0;
};

AngleKernelCoeffs angle_kernel_coeffs(const ExperimentParams& params, double z);

/// Throws DomainError when C + D·cos Δθ ≤ 0.
double joint_angle_pd_closed_form(const AngleKernelCoeffs& coeffs, double delta_theta);

enum class PolarMethod { quadrature, closed_form, monte_carlo };

/// Joint density of (θ_s, θ_i) on a periodic grid over [−π, π). The values
/// depend on θ_s − θ_i only, so the full grid is generated from `profile`,
/// where profile[m] is the density at θ_s − θ_i = m·step.
struct PolarJointPD {
  UniformAxis theta;
  std::vector<double> profile;  ///< max-normalized
  PolarMethod method = PolarMethod::quadrature;
  double z = 0.0;
  std::size_t n_radial = 0;  ///< radial points used after refinement

  double operator()(std::size_t is, std::size_t ii) const {
    return profile[(is + theta.size - ii) % theta.size];
  }
  /// Index of θ = 0 on the grid.
  std::size_t zero_index() const { return theta.size / 2; }
  /// Conditional slice P(θ_s | θ_i = theta[ii]).
  std::vector<double> slice(std::size_t ii) const;
  /// Offset Δθ in [−π, π) of the profile maximum.
  double peak_offset() const;
  JointDistribution2D to_distribution() const;
};

struct AngleQuadrature {
  std::size_t n_theta = 256;
  std::size_t n_radial = 256;      ///< starting radial resolution, doubled until stable
  std::size_t max_radial = 4096;
  double tolerance = 1e-3;         ///< max change between doublings, relative to peak
  unsigned workers = 1;
};

/// ∬ r_s r_i P(r_s, θ_s, r_i, θ_i; z) dr_s dr_i by composite midpoint on
/// [0, 5·max(w_z, σ_z)]². Throws ConvergenceError when the refinement does not
/// settle before max_radial.
PolarJointPD joint_angle_pd_quadrature(const ExperimentParams& params, double z,
                                       const AngleQuadrature& quad = {});

/// Same profile construction as the quadrature, for explicit widths. Used by
/// the turbulence module for the ensemble-averaged Gaussian.
PolarJointPD angle_pd_from_widths(double w, double sigma, double z, const AngleQuadrature& quad);

enum class AngleSigmaMethod { fwhm_closed_form, stddev_quadrature };

/// fwhm_closed_form: full width at half maximum of the closed form about its
/// peak; saturated (value π/√3) when the half-maximum level is not reached.
/// stddev_quadrature: circular standard deviation of the θ_i = 0 slice.
UncertaintyEstimate conditional_angle_sigma(const ExperimentParams& params, double z,
                                            AngleSigmaMethod method,
                                            const AngleQuadrature& quad = {});

/// Circular standard deviation of the θ_i = 0 slice within ±window of the peak.
double slice_stddev(const PolarJointPD& pd, double window);

/// Near-field law Δθ ≈ slope·z with slope 4√(2^{2/3}−1)/(k σ0 w0).
double angle_near_slope(const ExperimentParams& params);
/// Far-field law Δθ ≈ coefficient/z with coefficient 4√(2^{2/3}−1)·k σ0 w0.
double angle_far_coefficient(const ExperimentParams& params);

}  // namespace revival
