#include <algorithm>
#include <cmath>
#include <numbers>

#include "least_squares.hpp"
#include "revival/coincidence.hpp"
#include "revival/errors.hpp"
#include "revival/grid.hpp"

namespace revival {

namespace {

constexpr double pi = std::numbers::pi;

struct MapPoint {
  double s1, s2, y;  // coordinates (scaled) and normalized net value
};

struct PositionResidual {
  std::vector<MapPoint> pts;
  template <class T>
  bool operator()(const T* p, T* r) const {
    // p: b, a, sigma1, sigma2, mu_sum, mu_diff, n/sigma1, m/sigma2
    const T n = p[6] * p[2];
    const T m = p[7] * p[3];
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const T su = T(pts[k].s1 + pts[k].s2) - p[4];
      const T di = T(pts[k].s1 - pts[k].s2) - p[5];
      const T pr = exp(-su * su / (T(2.0) * p[2] * p[2]) - di * di / (T(2.0) * p[3] * p[3]));
      const T pn = exp(-su * su / (T(2.0) * n * n) - di * di / (T(2.0) * m * m));
      r[k] = p[0] * pr + p[1] * pn - T(pts[k].y);
    }
    return true;
  }
};

struct AngleResidual {
  std::vector<MapPoint> pts;
  template <class T>
  bool operator()(const T* p, T* r) const {
    // p: b, a, u (q = tanh u), c
    const T q = tanh(p[2]);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const T base = T(1.0) + q * cos(T(pts[k].s1 - pts[k].s2) - p[3]);
      r[k] = p[0] / (base * sqrt(base)) + p[1] - T(pts[k].y);
    }
    return true;
  }
};

double map_peak(const CoincidenceMap& map) {
  double peak = 0.0;
  for (std::size_t i = 0; i < map.bins(); ++i)
    for (std::size_t j = 0; j < map.bins(); ++j)
      if (!map.excluded(i, j))
        peak = std::max(peak, map.net(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  if (!(peak > 0.0)) throw DataError("coincidence map has no positive entries");
  return peak;
}

void require_size(const CoincidenceMap& map) {
  if (map.bins() < 10) throw DataError("fit needs at least 10x10 map entries");
}

}  // namespace

PositionFit fit_position_map(const CoincidenceMap& map) {
  require_size(map);
  if (map.kind != MapKind::strips) throw DataError("position fit needs a strip map");
  const double unit = std::abs(map.coords[1] - map.coords[0]);
  const double peak = map_peak(map);
  std::vector<MapPoint> pts;
  double w = 0.0, ms = 0.0, md = 0.0, vs = 0.0, vd = 0.0;
  for (std::size_t i = 0; i < map.bins(); ++i)
    for (std::size_t j = 0; j < map.bins(); ++j) {
      if (map.excluded(i, j)) continue;
      const double y = map.net(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / peak;
      pts.push_back({map.coords[i] / unit, map.coords[j] / unit, y});
    }
  // Second moments of the positive part, above the noise floor.
  for (const MapPoint& p : pts) {
    if (p.y < 0.1) continue;
    w += p.y;
    ms += p.y * (p.s1 + p.s2);
    md += p.y * (p.s1 - p.s2);
  }
  ms /= w;
  md /= w;
  for (const MapPoint& p : pts) {
    if (p.y < 0.1) continue;
    vs += p.y * (p.s1 + p.s2 - ms) * (p.s1 + p.s2 - ms);
    vd += p.y * (p.s1 - p.s2 - md) * (p.s1 - p.s2 - md);
  }
  const double span = static_cast<double>(map.bins());
  const double s1 = std::clamp(std::sqrt(vs / w), 0.5, 10.0 * span);
  const double s2 = std::clamp(std::sqrt(vd / w), 0.5, 10.0 * span);
  const auto n_pts = static_cast<int>(pts.size());
  auto sol = detail::solve_bounded<8>(
      new PositionResidual{std::move(pts)}, n_pts,
      {1.0, 0.01, s1, s2, std::clamp(ms, -span, span), std::clamp(md, -span, span), 10.0, 10.0},
      {0.0, 0.0, 0.05, 0.05, -2.0 * span, -2.0 * span, 5.0, 5.0},
      {100.0, 100.0, 20.0 * span, 20.0 * span, 2.0 * span, 2.0 * span, 1000.0, 1000.0},
      {"b", "a", "sigma1", "sigma2", "mu_sum", "mu_diff", "n_over_sigma1", "m_over_sigma2"});

  const std::vector<double>& x = sol.params;
  PositionFit fit;
  fit.params = {x[0] * peak, x[1] * peak, x[2] * unit, x[3] * unit, x[4] * unit, x[5] * unit,
                x[6] * x[2] * unit, x[7] * x[3] * unit};
  FitDiagnostics diag = std::move(sol.diagnostics);
  Eigen::VectorXd scale(8);
  scale << peak, peak, unit, unit, unit, unit, 1.0, 1.0;
  diag.covariance = scale.asDiagonal() * diag.covariance * scale.asDiagonal();
  for (std::size_t i = 0; i < diag.parameters.size(); ++i) diag.parameters[i] *= scale(static_cast<Eigen::Index>(i));
  diag.residual_norm *= peak;

  const double a = fit.params.sigma1, b = fit.params.sigma2;
  fit.estimate.value = a * b / std::sqrt(a * a + b * b);
  fit.estimate.unit = Unit::meter;
  fit.estimate.method = Method::fitted;
  fit.estimate.diagnostics = std::move(diag);
  return fit;
}

double angle_model_stddev(double q, double c) {
  const std::size_t n = 4096;
  const UniformAxis axis = UniformAxis::periodic_angle(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double base = 1.0 + q * std::cos(axis[i] - c);
    v[i] = 1.0 / (base * std::sqrt(base));
  }
  if (q == 0.0) return pi / std::sqrt(3.0);
  return circular_stddev(axis, v, pi);
}

AngleFit fit_angle_map(const CoincidenceMap& map) {
  require_size(map);
  if (map.kind != MapKind::sectors) throw DataError("angle fit needs a sector map");
  const std::size_t n = map.bins();
  const double peak = map_peak(map);
  std::vector<MapPoint> pts;
  std::vector<double> marginal(n, 0.0);
  std::vector<int> hits(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (map.excluded(i, j)) continue;
      const double y = map.net(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / peak;
      pts.push_back({map.coords[i], map.coords[j], y});
      const std::size_t m = (i + n - j) % n;
      marginal[m] += y;
      ++hits[m];
    }
  std::size_t best = 1, worst = 1;
  for (std::size_t m = 1; m < n; ++m) {
    marginal[m] /= hits[m];
    if (marginal[m] > marginal[best]) best = m;
    if (marginal[m] < marginal[worst]) worst = m;
  }
  const double step = 2.0 * pi / static_cast<double>(n);
  double offset = step * static_cast<double>(best);
  if (offset > pi) offset -= 2.0 * pi;
  const bool near_zero = std::abs(offset) <= pi / 2.0;
  double c0 = near_zero ? offset : (offset > 0.0 ? offset - pi : offset + pi);
  c0 = std::clamp(c0, -pi / 2.0, pi / 2.0);

  const double hi = marginal[best], lo = marginal[worst];
  double mag = 0.8;
  if (lo > 0.0) {
    const double r = std::cbrt((hi / lo) * (hi / lo));
    mag = std::clamp((r - 1.0) / (r + 1.0), 0.01, 0.95);
  }
  const double q0 = near_zero ? -mag : mag;
  const double pmax = std::pow(1.0 - mag, -1.5), pmin = std::pow(1.0 + mag, -1.5);
  const double b0 = std::clamp((hi - lo) / (pmax - pmin), 1e-6, 1e3);
  const double a0 = std::clamp(lo - b0 * pmin, -10.0, 10.0);

  const auto n_pts = static_cast<int>(pts.size());
  auto sol = detail::solve_bounded<4>(new AngleResidual{std::move(pts)}, n_pts,
                                      {b0, a0, std::atanh(q0), c0},
                                      {0.0, -10.0, -5.0, -pi / 2.0}, {1e3, 10.0, 5.0, pi / 2.0},
                                      {"b", "a", "q", "c"});
  const std::vector<double>& x = sol.params;
  AngleFit fit;
  const double q = std::tanh(x[2]);
  fit.params = {x[0] * peak, x[1] * peak, q, x[3]};
  FitDiagnostics diag = std::move(sol.diagnostics);
  Eigen::Vector4d jac(peak, peak, 1.0 - q * q, 1.0);
  diag.covariance = jac.asDiagonal() * diag.covariance * jac.asDiagonal();
  diag.parameters = {fit.params.b, fit.params.a, fit.params.q, fit.params.c};
  diag.residual_norm *= peak;

  fit.estimate.value = angle_model_stddev(q, fit.params.c);
  fit.estimate.unit = Unit::radian;
  fit.estimate.method = Method::fitted;
  fit.estimate.diagnostics = std::move(diag);
  return fit;
}

}  // namespace revival
