#pragma once

// Direct quadrature of the two-photon propagation through a Gaussian
// turbulence plane. The 8-D integral over both field copies factorizes into
// identical x and y parts; each 4-D part is a midpoint sum over a uniform
// per-photon node grid at the plane, contracted as Ψ·M_i·Ψᴴ then against M_s.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct TurbulentCase {
  double k, w0, sigma0, d, z, r;
};

/// Pair density of one transverse axis, G(x_s, x_i), on a square grid of
/// `points` samples over [−half, half]; row index is x_s.
inline Eigen::MatrixXd axis_density(const TurbulentCase& c, double half, int points) {
  using cd = std::complex<double>;
  const cd I(0.0, 1.0);
  const double K = c.k / 2.0;
  const double L = c.z - c.d;
  const double zw = c.k * c.w0 * c.w0, zs = c.k * c.sigma0 * c.sigma0;
  const double wd = c.w0 * std::sqrt(1.0 + c.d * c.d / (zw * zw));
  const double sd = c.sigma0 * std::sqrt(1.0 + c.d * c.d / (zs * zs));
  const double ext = 3.7 * (wd + sd);
  const double dt = std::min(wd, sd) / 4.0;
  const int n = 2 * static_cast<int>(std::ceil(ext / dt)) + 1;
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j) t[j] = -ext + j * (2.0 * ext / (n - 1));

  // amplitude at the plane in sum/difference coordinates
  Eigen::MatrixXcd psi(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double u = t[a] + t[b], v = t[a] - t[b];
      psi(a, b) = std::exp(I * K * u * u / (2.0 * (c.d - I * zw)) + I * K * v * v / (2.0 * (c.d - I * zs)));
    }
  Eigen::MatrixXd coh(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) coh(a, b) = std::exp(-(t[a] - t[b]) * (t[a] - t[b]) / (2.0 * c.r * c.r));

  const double step = 2.0 * half / (points - 1);
  auto kernel = [&](double x) {
    Eigen::VectorXcd e(n);
    for (int a = 0; a < n; ++a) e(a) = std::polar(1.0, c.k * (x - t[a]) * (x - t[a]) / (2.0 * L));
    Eigen::MatrixXcd M = e * e.adjoint();
    return Eigen::MatrixXcd(M.cwiseProduct(coh.cast<cd>()));
  };
  std::vector<Eigen::MatrixXcd> M(points), B(points);
  for (int p = 0; p < points; ++p) {
    M[p] = kernel(-half + p * step);
    B[p] = psi * M[p] * psi.adjoint();
  }
  Eigen::MatrixXd G(points, points);
  for (int p = 0; p < points; ++p)
    for (int q = 0; q < points; ++q) G(p, q) = M[p].cwiseProduct(B[q]).sum().real();
  return G;
}

/// Angle profile at Δ = m·2π/n for θ_i = 0 from the axis density grid,
/// by midpoint radial quadrature with bilinear interpolation.
inline std::vector<double> angle_profile_from_grid(const Eigen::MatrixXd& G, double half,
                                                   std::size_t n_theta, int n_r) {
  const int points = static_cast<int>(G.rows());
  const double step = 2.0 * half / (points - 1);
  auto at = [&](double x, double y) {
    const double fx = (x + half) / step, fy = (y + half) / step;
    if (fx < 0 || fy < 0 || fx >= points - 1 || fy >= points - 1) return 0.0;
    const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    const double tx = fx - ix, ty = fy - iy;
    return (1 - tx) * ((1 - ty) * G(ix, iy) + ty * G(ix, iy + 1)) +
           tx * ((1 - ty) * G(ix + 1, iy) + ty * G(ix + 1, iy + 1));
  };
  const double h = half / n_r;
  std::vector<double> out(n_theta);
  double peak = 0.0;
  for (std::size_t m = 0; m < n_theta; ++m) {
    const double delta = 2.0 * 3.14159265358979323846 * static_cast<double>(m) / n_theta;
    double sum = 0.0;
    for (int a = 0; a < n_r; ++a) {
      const double rs = (a + 0.5) * h;
      for (int b = 0; b < n_r; ++b) {
        const double ri = (b + 0.5) * h;
        sum += rs * ri * at(rs * std::cos(delta), ri) * at(rs * std::sin(delta), 0.0);
      }
    }
    out[m] = sum;
    peak = std::max(peak, sum);
  }
  for (double& v : out) v /= peak;
  return out;
}

}  // namespace oracle
