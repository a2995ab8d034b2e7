#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles/angle_integral.hpp"
#include "revival/angular.hpp"
#include "revival/errors.hpp"

using namespace revival;
using std::numbers::pi;

namespace {

const ExperimentParams P = reference_params();

AngleQuadrature quad(std::size_t n_theta = 128) {
  AngleQuadrature q;
  q.n_theta = n_theta;
  return q;
}

}  // namespace

TEST_CASE("radial quadrature matches the reduced integral") {
  for (double z : {1e-3, 1e-2, 0.1, 0.5, 3.0}) {
    const PolarJointPD pd = joint_angle_pd_quadrature(P, z, quad());
    const BeamWidths bw = beam_widths(P, z);
    const std::vector<double> ref = oracle::angle_profile(bw.w_z, bw.sigma_z, 128);
    double worst = 0.0;
    for (std::size_t m = 0; m < 128; ++m) worst = std::max(worst, std::abs(pd.profile[m] - ref[m]));
    CAPTURE(z);
    CHECK(worst < 3e-3);
    CHECK(pd.method == PolarMethod::quadrature);
    CHECK(pd.n_radial >= 256);
  }
}

TEST_CASE("peak location flips between near and far field") {
  const PolarJointPD near = joint_angle_pd_quadrature(P, 1e-3, quad());
  CHECK(near.peak_offset() == 0.0);
  const PolarJointPD far = joint_angle_pd_quadrature(P, 0.5, quad());
  CHECK(std::abs(far.peak_offset()) == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("shift invariance and periodicity") {
  const PolarJointPD pd = joint_angle_pd_quadrature(P, 0.05, quad());
  const std::size_t n = pd.theta.size;
  const std::vector<double> base = pd.slice(pd.zero_index());
  for (std::size_t shift : {1u, 7u, 64u, 127u}) {
    const std::vector<double> moved = pd.slice((pd.zero_index() + shift) % n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(moved[(i + shift) % n] - base[i]));
    CHECK(worst < 1e-10);
  }
  CHECK(std::abs(pd.profile[n - 1] - pd.profile[1]) < 1e-10);
  const JointDistribution2D d = pd.to_distribution();
  CHECK(d.max_normalized());
  CHECK(d.values().size() == n * n);
}

TEST_CASE("output does not depend on the worker count") {
  AngleQuadrature one = quad(), three = quad();
  three.workers = 3;
  CHECK(joint_angle_pd_quadrature(P, 0.02, one).profile == joint_angle_pd_quadrature(P, 0.02, three).profile);
}

TEST_CASE("quadrature preconditions and refinement failure") {
  AngleQuadrature q = quad();
  q.n_theta = 63;
  CHECK_THROWS_AS(joint_angle_pd_quadrature(P, 0.1, q), DomainError);
  q.n_theta = 66 + 1;
  CHECK_THROWS_AS(joint_angle_pd_quadrature(P, 0.1, q), DomainError);
  q = quad();
  q.n_radial = 64;
  CHECK_THROWS_AS(joint_angle_pd_quadrature(P, 0.1, q), DomainError);
  q = quad();
  q.tolerance = 1e-15;
  q.max_radial = 512;
  CHECK_THROWS_AS(joint_angle_pd_quadrature(P, 0.1, q), ConvergenceError);
}

TEST_CASE("kernel coefficients") {
  const AngleKernelCoeffs c0 = angle_kernel_coeffs(P, 0.0);
  CHECK(c0.D < 0.0);
  CHECK(c0.C > 0.0);
  CHECK(c0.C == doctest::Approx(0.5 * (1 / (P.w0 * P.w0) + 1 / (P.sigma0 * P.sigma0))).epsilon(1e-14));
  CHECK(angle_kernel_coeffs(P, 10.0).D > 0.0);
  CHECK(c0.P0 == doctest::Approx(std::sqrt(pi / 2) / 8).epsilon(1e-15));
  for (double z : {0.0, 1e-3, 0.1, 10.0})
    for (double t : {0.0, 1.0, pi}) {
      const AngleKernelCoeffs c = angle_kernel_coeffs(P, z);
      CHECK(c.C + c.D * std::cos(t) > 0.0);
    }
}

TEST_CASE("closed form") {
  AngleKernelCoeffs flat{1.0, 2.0, 0.0, 0.0};
  for (double t : {0.0, 1.0, 2.5}) CHECK(joint_angle_pd_closed_form(flat, t) == doctest::Approx(std::pow(2.0, -1.5)));
  const AngleKernelCoeffs near = angle_kernel_coeffs(P, 1e-3);
  CHECK(joint_angle_pd_closed_form(near, 0.0) > joint_angle_pd_closed_form(near, pi));
  const AngleKernelCoeffs far = angle_kernel_coeffs(P, 0.5);
  CHECK(joint_angle_pd_closed_form(far, pi) > joint_angle_pd_closed_form(far, 0.0));
  CHECK_THROWS_AS(joint_angle_pd_closed_form({1.0, 1.0, -2.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("closed form and quadrature agree on the peak") {
  for (double z : {5e-4, 2e-3, 1e-2, 4e-2, 0.08, 0.2, 0.5, 2.0}) {
    const AngleKernelCoeffs c = angle_kernel_coeffs(P, z);
    const bool closed_at_zero = joint_angle_pd_closed_form(c, 0.0) > joint_angle_pd_closed_form(c, pi);
    const bool quad_at_zero = joint_angle_pd_quadrature(P, z, quad()).peak_offset() == 0.0;
    CAPTURE(z);
    CHECK(closed_at_zero == quad_at_zero);
  }
}

TEST_CASE("fwhm closed form laws") {
  const double slope = angle_near_slope(P);
  CHECK(slope == doctest::Approx(60.26746571438719).epsilon(1e-12));
  CHECK(angle_far_coefficient(P) == doctest::Approx(0.1559451143346746).epsilon(1e-12));
  // linear window kσ0² ≪ z ≪ kσ0w0 is only about a decade wide
  const double z = 5e-3;
  const auto w = conditional_angle_sigma(P, z, AngleSigmaMethod::fwhm_closed_form);
  CHECK(w.method == Method::analytic);
  CHECK(w.unit == Unit::radian);
  CHECK_FALSE(w.saturated);
  CHECK(w.value / z == doctest::Approx(slope).epsilon(0.05));
  const double a = conditional_angle_sigma(P, 5e-3, AngleSigmaMethod::fwhm_closed_form).value;
  const double b = conditional_angle_sigma(P, 1e-2, AngleSigmaMethod::fwhm_closed_form).value;
  CHECK(b / a == doctest::Approx(2.0).epsilon(0.02));
  const double zf = 0.5;
  const double wf = conditional_angle_sigma(P, zf, AngleSigmaMethod::fwhm_closed_form).value;
  CHECK(wf * zf / angle_far_coefficient(P) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fwhm saturates when the density is flat") {
  const double zc = crossover_distance(P);
  const auto w = conditional_angle_sigma(P, zc, AngleSigmaMethod::fwhm_closed_form);
  CHECK(w.saturated);
  CHECK(w.value == doctest::Approx(pi / std::sqrt(3.0)));
}

TEST_CASE("stddev rises then falls") {
  const double a = conditional_angle_sigma(P, 1e-3, AngleSigmaMethod::stddev_quadrature, quad()).value;
  const double b = conditional_angle_sigma(P, 5e-2, AngleSigmaMethod::stddev_quadrature, quad()).value;
  const double c = conditional_angle_sigma(P, 1.0, AngleSigmaMethod::stddev_quadrature, quad()).value;
  CHECK(b > a);
  CHECK(b > c);
  const auto est = conditional_angle_sigma(P, 1e-3, AngleSigmaMethod::stddev_quadrature, quad());
  CHECK(est.method == Method::quadrature);
}

TEST_CASE("circular stddev of a uniform density") {
  const UniformAxis axis = UniformAxis::periodic_angle(4096);
  const std::vector<double> flat(4096, 1.0);
  CHECK(circular_stddev(axis, flat, pi) == doctest::Approx(pi / std::sqrt(3.0)).epsilon(1e-3));
}
