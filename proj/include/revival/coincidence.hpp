#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "revival/frames.hpp"
#include "revival/uncertainty.hpp"

namespace revival {

struct CoincidenceValue {
  double true_term = 0.0;
  double accidental = 0.0;
  double net = 0.0;
  double standard_error = 0.0;  ///< of net, from the spread of per-frame terms
  std::size_t frame_pairs = 0;
};

/// (1/M)Σ n_p^k n_q^k − (1/M)Σ n_p^k n_q^{k+1}, both sums over k < N−1 and
/// M = N−1. Throws DataError for fewer than two frames.
CoincidenceValue coincidence_series(std::span<const std::int64_t> np,
                                    std::span<const std::int64_t> nq);

/// Pixels are (col, row) pairs.
CoincidenceValue coincidence_pixels(const FrameStack& stack, std::uint32_t p_col,
                                    std::uint32_t p_row, std::uint32_t q_col, std::uint32_t q_row);

enum class MapKind { strips, sectors };

/// Net coincidences between bins (signal bin i, idler bin j). Diagonal
/// entries are flagged excluded.
struct CoincidenceMap {
  MapKind kind = MapKind::strips;
  std::vector<double> coords;  ///< object-plane y (m) or sector angle (rad) per bin
  Eigen::MatrixXd true_term;
  Eigen::MatrixXd accidental;
  Eigen::MatrixXd net;
  std::size_t frame_pairs = 0;

  std::size_t bins() const { return coords.size(); }
  bool excluded(std::size_t i, std::size_t j) const { return i == j; }
};

/// Horizontal strips of strip_height rows; throws DataError unless the
/// height divides the sensor height.
CoincidenceMap coincidence_strips(const FrameStack& stack, std::uint32_t strip_height);

/// Angular sectors about (center_x, center_y) in pixel coordinates. Sector s
/// covers angles [−π + s·2π/n, −π + (s+1)·2π/n) + angle_offset.
CoincidenceMap coincidence_sectors(const FrameStack& stack, std::size_t n_sectors,
                                   double center_x, double center_y, double angle_offset = 0.0);

/// CSV `i,j,coord_i,coord_j,true,accidental,net,excluded`.
void write_csv(std::ostream& out, const CoincidenceMap& map);

struct PositionFitParams {
  double b = 0.0;
  double a = 0.0;
  double sigma1 = 0.0;  ///< sum-coordinate width (m)
  double sigma2 = 0.0;  ///< difference-coordinate width (m)
  double mu_sum = 0.0;
  double mu_diff = 0.0;
  double n = 0.0;  ///< noise width of the sum coordinate, ≥ 5·sigma1
  double m = 0.0;  ///< noise width of the difference coordinate, ≥ 5·sigma2
};

struct PositionFit {
  PositionFitParams params;
  UncertaintyEstimate estimate;  ///< σ1σ2/√(σ1²+σ2²), fitted
};

/// b·P_r + a·P_n over the non-excluded strip entries.
PositionFit fit_position_map(const CoincidenceMap& map);

struct AngleFitParams {
  double b = 0.0;
  double a = 0.0;
  double q = 0.0;  ///< |q| < 1; negative peaks at Δθ = 0, positive at Δθ = π
  double c = 0.0;  ///< phase in [−π/2, π/2]
};

struct AngleFit {
  AngleFitParams params;
  UncertaintyEstimate estimate;  ///< circular stddev of the fitted P_r slice
};

/// b/(1 + q·cos(θ_s − θ_i − c))^{3/2} + a over the non-excluded sector entries.
AngleFit fit_angle_map(const CoincidenceMap& map);

/// Circular stddev of 1/(1 + q·cos(θ − c))^{3/2} over [−π, π) about its peak.
double angle_model_stddev(double q, double c);

}  // namespace revival
