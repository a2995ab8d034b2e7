#include "revival/certify.hpp"

#include <cmath>

#include "revival/errors.hpp"
#include "revival/parallel.hpp"

namespace revival {

EprProduct epr_product(Basis basis, const ExperimentParams& params, double z,
                       std::optional<double> measured,
                       const std::optional<TurbulenceParams>& turb,
                       const EprSettings& settings) {
  if (!measured)
    throw ConfigError(basis == Basis::position_momentum ? "missing momentum uncertainty (delta_p)"
                                                        : "missing OAM uncertainty (delta_l)");
  EprProduct out;
  out.basis = basis;
  out.z = z;
  if (basis == Basis::position_momentum) {
    out.first = conditional_position_sigma(params, z);
    out.second.unit = Unit::hbar_per_meter;
  } else {
    if (turb && z > turb->d)
      out.first = conditional_angle_sigma_turbulent(params, *turb, z, settings.sampling,
                                                    settings.window);
    else
      out.first = conditional_angle_sigma(params, z, AngleSigmaMethod::stddev_quadrature,
                                          settings.angle);
    out.second.unit = Unit::hbar;
  }
  out.second.value = *measured;
  out.second.method = Method::fitted;
  out.second.z = z;
  out.product = out.first.value * out.second.value;
  out.entangled = out.product < 0.5;
  return out;
}

std::vector<double> log_spaced(double z_min, double z_max, std::size_t points) {
  if (!(z_min > 0.0) || !(z_max > z_min) || points < 2)
    throw DomainError("log grid needs 0 < z_min < z_max and at least two points");
  std::vector<double> out(points);
  const double ratio = std::log(z_max / z_min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = z_min * std::exp(ratio * static_cast<double>(i));
  out.back() = z_max;
  return out;
}

ScanResult scan(const std::function<double(double)>& f, const std::vector<double>& zs,
                double resolution, unsigned workers) {
  for (std::size_t i = 1; i < zs.size(); ++i)
    if (!(zs[i] > zs[i - 1])) throw DomainError("scan distances must be strictly increasing");
  ScanResult out;
  out.z = zs;
  out.product.resize(zs.size());
  parallel_chunks(zs.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out.product[i] = f(zs[i]);
  });
  for (std::size_t i = 1; i < zs.size(); ++i) {
    const bool below_before = out.product[i - 1] < 0.5;
    const bool below_after = out.product[i] < 0.5;
    if (below_before == below_after) continue;
    double lo = zs[i - 1], hi = zs[i];
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      if ((f(mid) < 0.5) == below_before)
        lo = mid;
      else
        hi = mid;
    }
    out.crossings.push_back({0.5 * (lo + hi), below_before ? CrossingKind::loss : CrossingKind::revival});
  }
  return out;
}

ScanResult find_revival(const ExperimentParams& params,
                        const std::optional<TurbulenceParams>& turb, double delta_l,
                        double z_min, double z_max, std::size_t points,
                        const EprSettings& settings, unsigned workers) {
  const auto f = [&](double z) {
    return epr_product(Basis::angle_oam, params, z, delta_l, turb, settings).product;
  };
  return scan(f, log_spaced(z_min, z_max, points), 1e-3, workers);
}

double far_field_revival(const ExperimentParams& params, double delta_l) {
  return angle_far_coefficient(params) * delta_l / 0.5;
}

}  // namespace revival
