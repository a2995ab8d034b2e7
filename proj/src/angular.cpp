#include "revival/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "revival/errors.hpp"
#include "revival/parallel.hpp"

namespace revival {

namespace {

constexpr double pi = std::numbers::pi;

double half_max_level() { return std::cbrt(4.0); }  // 2^{2/3}

// Unnormalized Δθ profile for the Gaussian with sum width w and difference
// width sigma; only m ≤ n/2 is integrated, the rest follows from cos symmetry.
std::vector<double> radial_profile(double w, double sigma, std::size_t n_theta,
                                   std::size_t n_radial, unsigned workers) {
  const double R = 5.0 * std::max(w, sigma);
  // Dimensionless radius x = r/R.
  const double C = 0.5 * (1.0 / (w * w) + 1.0 / (sigma * sigma)) * R * R;
  const double D = 0.5 * (1.0 / (w * w) - 1.0 / (sigma * sigma)) * R * R;
  const double h = 1.0 / static_cast<double>(n_radial);
  std::vector<double> x(n_radial), e(n_radial);
  for (std::size_t i = 0; i < n_radial; ++i) {
    x[i] = (static_cast<double>(i) + 0.5) * h;
    e[i] = C * x[i] * x[i];
  }
  const std::size_t half = n_theta / 2;
  std::vector<double> profile(n_theta);
  parallel_chunks(half + 1, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const double c2 = 2.0 * D * std::cos(2.0 * pi * static_cast<double>(m) / n_theta);
      double total = 0.0;
      for (std::size_t i = 0; i < n_radial; ++i) {
        const double xi = x[i];
        double row = 0.5 * xi * xi * std::exp(-2.0 * e[i] - c2 * xi * xi);
        for (std::size_t j = 0; j < i; ++j)
          row += xi * x[j] * std::exp(-(e[i] + e[j]) - c2 * xi * x[j]);
        total += row;
      }
      profile[m] = 2.0 * total * h * h;
    }
  });
  for (std::size_t m = half + 1; m < n_theta; ++m) profile[m] = profile[n_theta - m];
  return profile;
}

void normalize(std::vector<double>& v) {
  const double peak = *std::max_element(v.begin(), v.end());
  for (double& x : v) x /= peak;
}

}  // namespace

AngleKernelCoeffs angle_kernel_coeffs(const ExperimentParams& params, double z) {
  const BeamWidths bw = beam_widths(params, z);
  const double a = 1.0 / (bw.w_z * bw.w_z);
  const double b = 1.0 / (bw.sigma_z * bw.sigma_z);
  return {std::sqrt(pi / 2.0) / 8.0, 0.5 * (a + b), 0.5 * (a - b), z};
}

double joint_angle_pd_closed_form(const AngleKernelCoeffs& coeffs, double delta_theta) {
  const double denom = coeffs.C + coeffs.D * std::cos(delta_theta);
  if (!(denom > 0.0)) throw DomainError("C + D cos(delta_theta) must be positive");
  return coeffs.P0 / (denom * std::sqrt(denom));
}

std::vector<double> PolarJointPD::slice(std::size_t ii) const {
  std::vector<double> out(theta.size);
  for (std::size_t is = 0; is < theta.size; ++is) out[is] = (*this)(is, ii);
  return out;
}

double PolarJointPD::peak_offset() const {
  const auto it = std::max_element(profile.begin(), profile.end());
  const auto m = static_cast<std::size_t>(it - profile.begin());
  double offset = theta.step * static_cast<double>(m);
  if (offset >= pi - 0.5 * theta.step) offset -= 2.0 * pi;
  return offset;
}

JointDistribution2D PolarJointPD::to_distribution() const {
  const std::size_t n = theta.size;
  std::vector<double> values(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) values[i * n + j] = (*this)(i, j);
  JointDistribution2D dist(theta, theta, std::move(values));
  dist.normalize_max();
  return dist;
}

PolarJointPD angle_pd_from_widths(double w, double sigma, double z, const AngleQuadrature& quad) {
  if (quad.n_theta < 64 || quad.n_theta % 2 != 0)
    throw DomainError("n_theta must be even and >= 64");
  if (quad.n_radial < 128) throw DomainError("n_radial must be >= 128");
  if (!(w > 0.0) || !(sigma > 0.0)) throw DomainError("widths must be positive");

  std::size_t n = quad.n_radial;
  std::vector<double> coarse = radial_profile(w, sigma, quad.n_theta, n, quad.workers);
  normalize(coarse);
  double change = 0.0;
  while (2 * n <= quad.max_radial) {
    n *= 2;
    std::vector<double> fine = radial_profile(w, sigma, quad.n_theta, n, quad.workers);
    normalize(fine);
    change = 0.0;
    for (std::size_t m = 0; m < fine.size(); ++m)
      change = std::max(change, std::abs(fine[m] - coarse[m]));
    coarse = std::move(fine);
    if (change <= quad.tolerance) {
      PolarJointPD pd;
      pd.theta = UniformAxis::periodic_angle(quad.n_theta);
      pd.profile = std::move(coarse);
      pd.method = PolarMethod::quadrature;
      pd.z = z;
      pd.n_radial = n;
      return pd;
    }
  }
  throw ConvergenceError("radial quadrature did not converge", change);
}

PolarJointPD joint_angle_pd_quadrature(const ExperimentParams& params, double z,
                                       const AngleQuadrature& quad) {
  const BeamWidths bw = beam_widths(params, z);
  return angle_pd_from_widths(bw.w_z, bw.sigma_z, z, quad);
}

double slice_stddev(const PolarJointPD& pd, double window) {
  const std::vector<double> s = pd.slice(pd.zero_index());
  return circular_stddev(pd.theta, s, window);
}

UncertaintyEstimate conditional_angle_sigma(const ExperimentParams& params, double z,
                                            AngleSigmaMethod method,
                                            const AngleQuadrature& quad) {
  UncertaintyEstimate est;
  est.unit = Unit::radian;
  est.z = z;
  if (method == AngleSigmaMethod::stddev_quadrature) {
    est.method = Method::quadrature;
    est.value = slice_stddev(joint_angle_pd_quadrature(params, z, quad), pi);
    return est;
  }
  est.method = Method::analytic;
  const AngleKernelCoeffs c = angle_kernel_coeffs(params, z);
  const double a = half_max_level();
  double x = 2.0;  // D = 0: flat, never reaches half maximum
  if (c.D < 0.0) x = (a - 1.0) * c.C / c.D + a;
  if (c.D > 0.0) x = a - (a - 1.0) * c.C / c.D;
  if (x < -1.0 || x > 1.0) {
    est.value = pi / std::sqrt(3.0);
    est.saturated = true;
  } else {
    est.value = 2.0 * std::acos(x);
  }
  return est;
}

double angle_near_slope(const ExperimentParams& params) {
  return 4.0 * std::sqrt(half_max_level() - 1.0) / (params.k * params.sigma0 * params.w0);
}

double angle_far_coefficient(const ExperimentParams& params) {
  return 4.0 * std::sqrt(half_max_level() - 1.0) * params.k * params.sigma0 * params.w0;
}

}  // namespace revival
