#pragma once

#include <cstddef>

#include "revival/grid.hpp"
#include "revival/uncertainty.hpp"

namespace revival {

/// Pump, crystal and derived constants of the Gaussian biphoton model.
/// All lengths in meters.
struct ExperimentParams {
  double w0 = 0.0;        ///< pump waist at the crystal
  double L = 0.0;         ///< crystal length
  double lambda_p = 0.0;  ///< pump wavelength
  double k = 0.0;         ///< down-converted wavenumber π/λp
  double sigma0 = 0.0;    ///< birth-zone width sqrt(0.455·L·λp/(2π))

  /// True when the pump is not much wider than the birth zone (w0 < 10·σ0),
  /// where the asymptotic laws lose accuracy.
  bool narrow_pump() const { return w0 < 10.0 * sigma0; }
};

/// Throws DomainError unless every input is positive and finite.
ExperimentParams derive_params(double w0, double L, double lambda_p);

/// Reference setup: w0 = 507 µm, L = 5 mm, λp = 355 nm.
ExperimentParams reference_params();

struct BeamWidths {
  double w_z = 0.0;      ///< width of the sum coordinate ρs+ρi
  double sigma_z = 0.0;  ///< width of the difference coordinate ρs−ρi
  double z = 0.0;
};

BeamWidths beam_widths(const ExperimentParams& params, double z);

/// Distance at which w(z) = σ(z), i.e. k·w0·σ0.
double crossover_distance(const ExperimentParams& params);

struct PositionGrid {
  std::size_t points = 512;
  /// Half width of the square grid; 0 selects 4·max(w_z, σ_z).
  double half_width = 0.0;
};

/// Max-normalized P(y_s, y_i; z) on the transverse y cut. Throws
/// TruncationError when the grid does not span ±3·max(w_z, σ_z).
JointDistribution2D joint_position_pd(const ExperimentParams& params, double z,
                                      const PositionGrid& grid = {});

/// Standard deviation of P(y_s | y_i = 0; z): (1/w_z² + 1/σ_z²)^{-1/2}.
UncertaintyEstimate conditional_position_sigma(const ExperimentParams& params, double z);

enum class PositionRegime { near, far, crossover };

struct RegimeApproximation {
  PositionRegime regime = PositionRegime::crossover;
  double value = 0.0;     ///< σ(z) in the near field, w(z) in the far field
  double width_ratio = 0.0;  ///< w_z / σ_z
};

/// Which asymptotic law governs the conditional position width. The
/// crossover is flagged when w_z and σ_z are within a factor of two.
RegimeApproximation position_scaling_regime(const ExperimentParams& params, double z);

/// ħ/sqrt(w0² + σ0²), in ħ per meter; independent of z.
UncertaintyEstimate conditional_momentum_sigma(const ExperimentParams& params);

/// Converts a conditional width measured in the Fourier plane of a lens of
/// focal length f into a momentum width: camera_sigma·k·ħ/f.
UncertaintyEstimate momentum_sigma_from_fourier_plane(double camera_sigma, double focal_length,
                                                      const ExperimentParams& params);

}  // namespace revival
