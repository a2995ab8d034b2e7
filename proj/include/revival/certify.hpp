#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "revival/angular.hpp"
#include "revival/optics.hpp"
#include "revival/turbulence.hpp"
#include "revival/uncertainty.hpp"

namespace revival {

enum class Basis { position_momentum, angle_oam };

struct EprProduct {
  Basis basis = Basis::angle_oam;
  double z = 0.0;
  double product = 0.0;  ///< multiples of ħ
  UncertaintyEstimate first;   ///< Δ(y_s|y_i) or Δ(θ_s|θ_i)
  UncertaintyEstimate second;  ///< Δ(p_s|p_i) or Δ(l_s|l_i)
  bool entangled = false;      ///< product < 0.5
};

struct EprSettings {
  AngleQuadrature angle;
  TurbulentSampling sampling;
  double window = 3.141592653589793;  ///< turbulent stddev window about the peak
};

/// measured is Δp in ħ/m for position_momentum, or Δl in ħ for angle_oam;
/// nullopt throws ConfigError. With turbulence and z > d the angle factor is
/// the turbulent Monte Carlo estimate; otherwise the clean quadrature.
EprProduct epr_product(Basis basis, const ExperimentParams& params, double z,
                       std::optional<double> measured,
                       const std::optional<TurbulenceParams>& turb = std::nullopt,
                       const EprSettings& settings = {});

enum class CrossingKind { loss, revival };

struct Crossing {
  double z = 0.0;
  CrossingKind kind = CrossingKind::loss;
};

struct ScanResult {
  std::vector<double> z;        ///< strictly increasing
  std::vector<double> product;  ///< in ħ
  std::vector<Crossing> crossings;
};

/// Evaluates f on `zs` (parallel over points) and bisects every sign change
/// of f − 0.5 down to `resolution`. An upward crossing is a loss, a
/// downward one a revival.
ScanResult scan(const std::function<double(double)>& f, const std::vector<double>& zs,
                double resolution = 1e-3, unsigned workers = 1);

std::vector<double> log_spaced(double z_min, double z_max, std::size_t points);

/// Angle-OAM scan over a log-spaced grid with bisection of each crossing.
ScanResult find_revival(const ExperimentParams& params,
                        const std::optional<TurbulenceParams>& turb, double delta_l,
                        double z_min, double z_max, std::size_t points = 40,
                        const EprSettings& settings = {}, unsigned workers = 1);

/// The clean revival distance from the far-field law: coefficient·Δl/z = 0.5.
double far_field_revival(const ExperimentParams& params, double delta_l);

}  // namespace revival
