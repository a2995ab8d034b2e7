#include "revival/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "revival/errors.hpp"

namespace revival {

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::meter: return "m";
    case Unit::radian: return "rad";
    case Unit::hbar_per_meter: return "hbar/m";
    case Unit::hbar: return "hbar";
  }
  return "?";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::analytic: return "analytic";
    case Method::quadrature: return "quadrature";
    case Method::fitted: return "fitted";
    case Method::monte_carlo: return "monte_carlo";
  }
  return "?";
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(name) + " must be positive and finite");
}

void require_distance(double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw DomainError("propagation distance must be >= 0");
}

}  // namespace

ExperimentParams derive_params(double w0, double L, double lambda_p) {
  require_positive(w0, "w0");
  require_positive(L, "L");
  require_positive(lambda_p, "lambda_p");
  ExperimentParams p;
  p.w0 = w0;
  p.L = L;
  p.lambda_p = lambda_p;
  p.k = std::numbers::pi / lambda_p;
  p.sigma0 = std::sqrt(0.455 * L * lambda_p / (2.0 * std::numbers::pi));
  return p;
}

ExperimentParams reference_params() { return derive_params(507e-6, 5e-3, 355e-9); }

BeamWidths beam_widths(const ExperimentParams& params, double z) {
  require_distance(z);
  const double k = params.k;
  const auto spread = [&](double a) { return a * std::sqrt(1.0 + z * z / (k * k * a * a * a * a)); };
  return {spread(params.w0), spread(params.sigma0), z};
}

double crossover_distance(const ExperimentParams& params) {
  return params.k * params.w0 * params.sigma0;
}

JointDistribution2D joint_position_pd(const ExperimentParams& params, double z,
                                      const PositionGrid& grid) {
  const BeamWidths bw = beam_widths(params, z);
  const double widest = std::max(bw.w_z, bw.sigma_z);
  const double half = grid.half_width > 0.0 ? grid.half_width : 4.0 * widest;
  if (half < 3.0 * widest) {
    // Mass of the sum/difference Gaussians beyond the grid edge, per axis.
    const double lost = std::erfc(half / (widest * std::numbers::sqrt2));
    throw TruncationError("position grid narrower than 3 max(w_z, sigma_z)", lost);
  }
  const UniformAxis axis = UniformAxis::centered(half, grid.points);
  const double a = 0.5 / (bw.w_z * bw.w_z);
  const double b = 0.5 / (bw.sigma_z * bw.sigma_z);
  std::vector<double> values(axis.size * axis.size);
  for (std::size_t i = 0; i < axis.size; ++i) {
    const double ys = axis[i];
    for (std::size_t j = 0; j < axis.size; ++j) {
      const double yi = axis[j];
      const double sum = ys + yi;
      const double diff = ys - yi;
      values[i * axis.size + j] = std::exp(-a * sum * sum - b * diff * diff);
    }
  }
  JointDistribution2D dist(axis, axis, std::move(values));
  dist.normalize_max();
  return dist;
}

UncertaintyEstimate conditional_position_sigma(const ExperimentParams& params, double z) {
  const BeamWidths bw = beam_widths(params, z);
  UncertaintyEstimate est;
  est.value = 1.0 / std::sqrt(1.0 / (bw.w_z * bw.w_z) + 1.0 / (bw.sigma_z * bw.sigma_z));
  est.unit = Unit::meter;
  est.method = Method::analytic;
  est.z = z;
  return est;
}

RegimeApproximation position_scaling_regime(const ExperimentParams& params, double z) {
  const BeamWidths bw = beam_widths(params, z);
  RegimeApproximation out;
  out.width_ratio = bw.w_z / bw.sigma_z;
  if (out.width_ratio > 2.0) {
    out.regime = PositionRegime::near;
    out.value = bw.sigma_z;
  } else if (out.width_ratio < 0.5) {
    out.regime = PositionRegime::far;
    out.value = bw.w_z;
  } else {
    out.regime = PositionRegime::crossover;
    out.value = conditional_position_sigma(params, z).value;
  }
  return out;
}

UncertaintyEstimate conditional_momentum_sigma(const ExperimentParams& params) {
  UncertaintyEstimate est;
  est.value = 1.0 / std::sqrt(params.w0 * params.w0 + params.sigma0 * params.sigma0);
  est.unit = Unit::hbar_per_meter;
  est.method = Method::analytic;
  return est;
}

UncertaintyEstimate momentum_sigma_from_fourier_plane(double camera_sigma, double focal_length,
                                                      const ExperimentParams& params) {
  require_positive(focal_length, "focal length");
  if (!(camera_sigma >= 0.0)) throw DomainError("camera sigma must be >= 0");
  UncertaintyEstimate est;
  est.value = camera_sigma * params.k / focal_length;
  est.unit = Unit::hbar_per_meter;
  est.method = Method::analytic;
  return est;
}

}  // namespace revival
