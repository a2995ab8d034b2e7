#include "revival/turbulence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <Eigen/Dense>

#include "revival/errors.hpp"
#include "revival/parallel.hpp"

namespace revival {

namespace {

constexpr double pi = std::numbers::pi;

double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Latin-hypercube standard normal pairs (κ_s, κ_i) followed by their
// antithetic partners; pair p occupies rows 2p and 2p+1.
Eigen::MatrixX2d tilt_draws(std::size_t pairs, std::uint64_t seed, std::uint64_t stream) {
  std::mt19937_64 rng = substream(seed, stream);
  const boost::math::normal_distribution<double> normal;
  Eigen::MatrixX2d out(2 * pairs, 2);
  for (int dim = 0; dim < 2; ++dim) {
    std::vector<std::size_t> perm(pairs);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t p = 0; p < pairs; ++p) {
      const double u = (static_cast<double>(perm[p]) + unit_open(rng)) / static_cast<double>(pairs);
      const double v = boost::math::quantile(normal, u);
      out(static_cast<Eigen::Index>(2 * p), dim) = v;
      out(static_cast<Eigen::Index>(2 * p + 1), dim) = -v;
    }
  }
  return out;
}

std::size_t grid_points(double extent, double width) {
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * extent / (0.25 * width))) | 1u;
  return std::clamp<std::size_t>(n, 65, 1025);
}

// Ensemble-averaged pair density of one transverse axis on a (u, v) grid,
// u = x_s + x_i, v = x_s − x_i; one matrix per batch.
struct AxisAverage {
  UniformAxis u, v;
  std::vector<Eigen::MatrixXd> batch;  // u × v
  Eigen::MatrixXd mean;

  double at(const Eigen::MatrixXd& m, double uu, double vv) const {
    const double fu = (uu - u.start) / u.step;
    const double fv = (vv - v.start) / v.step;
    if (fu < 0.0 || fv < 0.0) return 0.0;
    const auto iu = static_cast<Eigen::Index>(fu);
    const auto iv = static_cast<Eigen::Index>(fv);
    if (iu + 1 >= m.rows() || iv + 1 >= m.cols()) return 0.0;
    const double tu = fu - static_cast<double>(iu);
    const double tv = fv - static_cast<double>(iv);
    return (1.0 - tu) * ((1.0 - tv) * m(iu, iv) + tv * m(iu, iv + 1)) +
           tu * ((1.0 - tv) * m(iu + 1, iv) + tv * m(iu + 1, iv + 1));
  }
};

AxisAverage average_axis(double w, double sigma, double shift_scale, const Eigen::MatrixX2d& draws,
                         std::size_t batches) {
  const Eigen::Index n = draws.rows();
  const Eigen::VectorXd cu = shift_scale * (draws.col(0) + draws.col(1));
  const Eigen::VectorXd cv = shift_scale * (draws.col(0) - draws.col(1));
  AxisAverage out;
  const double eu = 6.0 * w + cu.cwiseAbs().maxCoeff();
  const double ev = 6.0 * sigma + cv.cwiseAbs().maxCoeff();
  const std::size_t nu = grid_points(eu, w);
  const std::size_t nv = grid_points(ev, sigma);
  out.u = {-eu, 2.0 * eu / static_cast<double>(nu - 1), nu};
  out.v = {-ev, 2.0 * ev / static_cast<double>(nv - 1), nv};

  Eigen::MatrixXd gu(n, static_cast<Eigen::Index>(nu));
  Eigen::MatrixXd gv(n, static_cast<Eigen::Index>(nv));
  for (Eigen::Index s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < nu; ++i) {
      const double d = out.u[i] - cu(s);
      gu(s, static_cast<Eigen::Index>(i)) = std::exp(-d * d / (2.0 * w * w));
    }
    for (std::size_t j = 0; j < nv; ++j) {
      const double d = out.v[j] - cv(s);
      gv(s, static_cast<Eigen::Index>(j)) = std::exp(-d * d / (2.0 * sigma * sigma));
    }
  }
  const Eigen::Index per = n / static_cast<Eigen::Index>(batches);
  out.mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nv));
  for (std::size_t b = 0; b < batches; ++b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * per;
    Eigen::MatrixXd avg = gu.middleRows(begin, per).transpose() * gv.middleRows(begin, per);
    avg /= static_cast<double>(per);
    out.mean += avg / static_cast<double>(batches);
    out.batch.push_back(std::move(avg));
  }
  return out;
}

// Angle profile over Δθ = m·2π/n_theta, averaged over the given idler angles.
std::vector<double> polar_profile(const AxisAverage& ax, const Eigen::MatrixXd& ex,
                                  const AxisAverage& ay, const Eigen::MatrixXd& ey,
                                  std::size_t n_theta, const std::vector<double>& idler_angles,
                                  double R, std::size_t n_r, unsigned workers) {
  const double h = R / static_cast<double>(n_r);
  std::vector<double> r(n_r);
  for (std::size_t i = 0; i < n_r; ++i) r[i] = (static_cast<double>(i) + 0.5) * h;
  std::vector<double> profile(n_theta);
  parallel_chunks(n_theta, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      const double delta = 2.0 * pi * static_cast<double>(m) / static_cast<double>(n_theta);
      double total = 0.0;
      for (double ti : idler_angles) {
        const double ts = ti + delta;
        const double cs = std::cos(ts), ss = std::sin(ts), ci = std::cos(ti), si = std::sin(ti);
        for (std::size_t a = 0; a < n_r; ++a) {
          const double xs = r[a] * cs, ys = r[a] * ss;
          for (std::size_t b = 0; b < n_r; ++b) {
            const double xi = r[b] * ci, yi = r[b] * si;
            const double px = ax.at(ex, xs + xi, xs - xi);
            if (px == 0.0) continue;
            total += r[a] * r[b] * px * ay.at(ey, ys + yi, ys - yi);
          }
        }
      }
      profile[m] = total * h * h / static_cast<double>(idler_angles.size());
    }
  });
  return profile;
}

PolarJointPD make_pd(std::vector<double> profile, std::size_t n_theta, double z, std::size_t n_r) {
  const double peak = *std::max_element(profile.begin(), profile.end());
  if (!(peak > 0.0)) throw ConvergenceError("turbulent angle density vanished on the grid", 1.0);
  for (double& v : profile) v /= peak;
  PolarJointPD pd;
  pd.theta = UniformAxis::periodic_angle(n_theta);
  pd.profile = std::move(profile);
  pd.method = PolarMethod::monte_carlo;
  pd.z = z;
  pd.n_radial = n_r;
  return pd;
}

}  // namespace

double TurbulenceParams::delta() const {
  return 1.0 / std::sqrt(1.0 / (r * r) + 1.0 / (4.0 * sigma_r * sigma_r));
}

double default_sigma_r(const ExperimentParams& params, double d) {
  const BeamWidths bw = beam_widths(params, d);
  return 0.5 * std::sqrt(bw.w_z * bw.w_z + bw.sigma_z * bw.sigma_z);
}

TurbulenceParams make_turbulence(const ExperimentParams& params, double d, double r,
                                 double sigma_r) {
  if (!(d > 0.0) || !(r > 0.0)) throw DomainError("turbulence needs d > 0 and r > 0");
  TurbulenceParams t;
  t.d = d;
  t.r = r;
  t.sigma_r = sigma_r > 0.0 ? sigma_r : default_sigma_r(params, d);
  t.k_s = params.k;
  return t;
}

PropagatedSignalCSD propagate_signal_csd(const TurbulenceParams& turb, double z) {
  if (!(z >= turb.d)) throw DomainError("signal CSD is defined beyond the turbulence plane");
  const double x = (z - turb.d) / (turb.k_s * turb.sigma_r * turb.delta());
  const double grow = std::sqrt(1.0 + x * x);
  return {z, turb.r * grow, turb.sigma_r * grow};
}

std::complex<double> tilt_kernel_average(double dx, double dy, double r, std::size_t samples,
                                         std::uint64_t seed) {
  if (!(r > 0.0) || samples == 0) throw DomainError("kernel average needs r > 0 and samples > 0");
  std::mt19937_64 rng = substream(seed, 0);
  std::normal_distribution<double> kick(0.0, 1.0 / r);
  std::complex<double> sum = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double phase = kick(rng) * dx + kick(rng) * dy;
    sum += std::polar(1.0, phase);
  }
  return sum / static_cast<double>(samples);
}

TurbulentAnglePD joint_angle_pd_turbulent(const ExperimentParams& params,
                                          const TurbulenceParams& turb, double z,
                                          const TurbulentSampling& sampling) {
  if (!(z > turb.d)) throw DomainError("turbulent propagation needs z > d");
  if (sampling.n_theta < 64 || sampling.n_theta % 2 != 0)
    throw DomainError("n_theta must be even and >= 64");
  if (sampling.batches < 2) throw DomainError("need at least two batches");
  const std::size_t per_batch = std::max<std::size_t>(
      1, (sampling.ensemble / 2 + sampling.batches - 1) / sampling.batches);
  const std::size_t pairs = per_batch * sampling.batches;

  const BeamWidths bw = beam_widths(params, z);
  const double shift = (z - turb.d) / (params.k * turb.r);
  const AxisAverage ax = average_axis(bw.w_z, bw.sigma_z, shift,
                                      tilt_draws(pairs, sampling.seed, 0), sampling.batches);
  const AxisAverage ay = average_axis(bw.w_z, bw.sigma_z, shift,
                                      tilt_draws(pairs, sampling.seed, 1), sampling.batches);

  const double w_t = std::sqrt(bw.w_z * bw.w_z + 2.0 * shift * shift);
  const double s_t = std::sqrt(bw.sigma_z * bw.sigma_z + 2.0 * shift * shift);
  const double R = 5.0 * std::max(w_t, s_t);
  const auto n_r = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(3.0 * R / std::min(w_t, s_t))), 128, 1024);

  TurbulentAnglePD out;
  const std::vector<double> idlers{0.0, pi / 8.0, pi / 4.0, 3.0 * pi / 8.0};
  out.pd = make_pd(polar_profile(ax, ax.mean, ay, ay.mean, sampling.n_theta, idlers, R, n_r,
                                 sampling.workers),
                   sampling.n_theta, z, n_r);

  const std::vector<double> zero{0.0};
  std::vector<std::vector<double>> batch_profiles;
  for (std::size_t b = 0; b < sampling.batches; ++b)
    batch_profiles.push_back(polar_profile(ax, ax.batch[b], ay, ay.batch[b], sampling.n_theta,
                                           zero, R, n_r, sampling.workers));
  const double nb = static_cast<double>(sampling.batches);
  std::vector<double> mean(sampling.n_theta, 0.0);
  for (const auto& p : batch_profiles)
    for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += p[m] / nb;
  const double peak = *std::max_element(mean.begin(), mean.end());
  double worst = 0.0;
  for (std::size_t m = 0; m < mean.size(); ++m) {
    double var = 0.0;
    for (const auto& p : batch_profiles) var += (p[m] - mean[m]) * (p[m] - mean[m]);
    worst = std::max(worst, std::sqrt(var / (nb - 1.0) / nb) / peak);
  }
  out.standard_error = worst;
  for (auto& p : batch_profiles) {
    const PolarJointPD bpd = make_pd(std::move(p), sampling.n_theta, z, n_r);
    out.batch_stddev.push_back(slice_stddev(bpd, pi));
  }
  if (worst > sampling.max_relative_error)
    throw ConvergenceError("tilt ensemble too small for the requested accuracy", worst);
  return out;
}

UncertaintyEstimate conditional_angle_sigma_turbulent(const ExperimentParams& params,
                                                      const TurbulenceParams& turb, double z,
                                                      const TurbulentSampling& sampling,
                                                      double window) {
  const TurbulentAnglePD t = joint_angle_pd_turbulent(params, turb, z, sampling);
  UncertaintyEstimate est;
  est.value = slice_stddev(t.pd, window);
  est.unit = Unit::radian;
  est.method = Method::monte_carlo;
  est.z = z;
  const double nb = static_cast<double>(t.batch_stddev.size());
  const double mean = std::accumulate(t.batch_stddev.begin(), t.batch_stddev.end(), 0.0) / nb;
  double var = 0.0;
  for (double s : t.batch_stddev) var += (s - mean) * (s - mean);
  est.standard_error = std::sqrt(var / (nb - 1.0) / nb);
  return est;
}

OamDistribution oam_spectrum_turbulent(const TurbulenceParams& turb, double z, int lmax,
                                       const OamQuadrature& quad) {
  if (!(z > turb.d)) throw DomainError("OAM spectrum is defined beyond the turbulence plane");
  if (lmax < 10) throw DomainError("lmax must be >= 10");
  const PropagatedSignalCSD csd = propagate_signal_csd(turb, z);
  const double R = 10.0 * csd.sigma_rz;
  const double h = R / static_cast<double>(quad.n_radial);
  const double a = 1.0 / (2.0 * csd.sigma_rz * csd.sigma_rz);
  const double c = 1.0 / (csd.r_z * csd.r_z);
  const double step = 2.0 * pi / static_cast<double>(quad.n_delta);
  std::vector<double> g(quad.n_delta);
  for (std::size_t j = 0; j < quad.n_delta; ++j) {
    const double delta = -pi + step * static_cast<double>(j);
    const double rate = a + c * (1.0 - std::cos(delta));
    double sum = 0.0;
    for (std::size_t i = 0; i < quad.n_radial; ++i) {
      const double rr = (static_cast<double>(i) + 0.5) * h;
      sum += rr * std::exp(-rate * rr * rr);
    }
    g[j] = sum * h;
  }
  OamDistribution out;
  out.lmax = lmax;
  out.p.resize(static_cast<std::size_t>(2 * lmax + 1));
  for (int l = -lmax; l <= lmax; ++l) {
    double sum = 0.0;
    for (std::size_t j = 0; j < quad.n_delta; ++j)
      sum += std::cos(l * (-pi + step * static_cast<double>(j))) * g[j];
    out(l) = sum * step;
  }
  const double peak = *std::max_element(out.p.begin(), out.p.end());
  for (double& v : out.p) {
    if (v < -1e-9 * peak) throw ConvergenceError("OAM spectrum quadrature went negative", -v / peak);
    v = std::max(v, 0.0);
  }
  out.normalize();
  return out;
}

}  // namespace revival
