#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include "revival/angular.hpp"
#include "revival/oam.hpp"
#include "revival/optics.hpp"
#include "revival/uncertainty.hpp"

namespace revival {

/// Thin Gaussian turbulence plane at distance d from the crystal.
struct TurbulenceParams {
  double d = 0.0;        ///< plane distance (m)
  double r = 0.0;        ///< coherence strength (m)
  double sigma_r = 0.0;  ///< signal mode width for the OAM analysis (m)
  double k_s = 0.0;      ///< signal wavenumber π/λp

  /// 1/δ² = 1/r² + 1/(4σ_r²)
  double delta() const;
};

/// Signal-mode width used when none is configured: the per-axis marginal
/// width of the clean biphoton at the plane, sqrt(w(d)² + σ(d)²)/2.
double default_sigma_r(const ExperimentParams& params, double d);

/// sigma_r ≤ 0 selects default_sigma_r.
TurbulenceParams make_turbulence(const ExperimentParams& params, double d, double r,
                                 double sigma_r = 0.0);

struct PropagatedSignalCSD {
  double z = 0.0;
  double r_z = 0.0;
  double sigma_rz = 0.0;
};

PropagatedSignalCSD propagate_signal_csd(const TurbulenceParams& turb, double z);

/// Monte Carlo estimate of E[exp(i κ·Δρ)] over kicks κ ~ N(0, 1/r²) per axis.
std::complex<double> tilt_kernel_average(double dx, double dy, double r, std::size_t samples,
                                         std::uint64_t seed);

struct TurbulentSampling {
  std::size_t n_theta = 256;
  std::size_t ensemble = 20000;  ///< tilt realizations per transverse axis
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t batches = 8;       ///< for the standard error
  double max_relative_error = 0.01;
};

struct TurbulentAnglePD {
  PolarJointPD pd;
  /// Largest batch standard error of the θ_i = 0 slice, relative to its peak.
  double standard_error = 0.0;
  /// Circular stddev of the θ_i = 0 slice for each batch.
  std::vector<double> batch_stddev;
};

/// Ensemble average over random tilt kicks at the plane, each realization
/// propagated as a pure Gaussian state to z, then reduced to polar angles.
/// Throws DomainError for z ≤ d and ConvergenceError when the ensemble
/// standard error exceeds max_relative_error of the peak.
TurbulentAnglePD joint_angle_pd_turbulent(const ExperimentParams& params,
                                          const TurbulenceParams& turb, double z,
                                          const TurbulentSampling& sampling = {});

/// Circular stddev of the θ_i = 0 slice within ±window of the peak; carries
/// the batch standard error.
UncertaintyEstimate conditional_angle_sigma_turbulent(const ExperimentParams& params,
                                                      const TurbulenceParams& turb, double z,
                                                      const TurbulentSampling& sampling = {},
                                                      double window = 3.141592653589793);

struct OamQuadrature {
  std::size_t n_delta = 1024;
  std::size_t n_radial = 2048;
};

/// Normalized signal OAM spectrum beyond the plane from the equal-radius
/// cross-spectral density.
OamDistribution oam_spectrum_turbulent(const TurbulenceParams& turb, double z, int lmax = 15,
                                       const OamQuadrature& quad = {});

}  // namespace revival
