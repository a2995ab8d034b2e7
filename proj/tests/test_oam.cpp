#include "least_squares.hpp"

// glog and doctest share assertion macro names
#undef CHECK
#undef CHECK_EQ
#undef CHECK_NE
#undef CHECK_LT
#undef CHECK_LE
#undef CHECK_GT
#undef CHECK_GE

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "revival/errors.hpp"
#include "revival/oam.hpp"

using namespace revival;

namespace {

OamNoiseModel delta_model(double S0, double N, double sf) {
  OamNoiseModel m;
  m.form = OamForm::delta_gaussian;
  m.S0 = S0;
  m.N = N;
  m.sigma_f = sf;
  return m;
}

}  // namespace

TEST_CASE("pure delta has zero width") {
  const OamDistribution d = conditional_oam_clean(delta_model(1.0, 0.0, 1.0));
  CHECK(d(0) == 1.0);
  CHECK(oam_uncertainty(d).value == 0.0);
  CHECK(oam_uncertainty(d).unit == Unit::hbar);
}

TEST_CASE("discrete gaussian width against brute-force moments") {
  const OamDistribution d = conditional_oam_clean(delta_model(0.0, 1.0, 1.0), 15);
  double s0 = 0, s2 = 0;
  for (int l = -40; l <= 40; ++l) {
    s0 += std::exp(-l * l / 2.0);
    s2 += l * l * std::exp(-l * l / 2.0);
  }
  CHECK(oam_uncertainty(d).value == doctest::Approx(std::sqrt(s2 / s0)).epsilon(1e-12));
  CHECK(oam_uncertainty(d).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("clean distribution is symmetric and normalized") {
  const OamDistribution d = conditional_oam_clean(delta_model(0.6, 0.1, 1.5));
  double total = 0;
  for (int l = -15; l <= 15; ++l) {
    CHECK(d(l) == d(-l));
    total += d(l);
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(d.normalized);
}

TEST_CASE("truncation is reported") {
  CHECK_THROWS_AS(conditional_oam_clean(delta_model(0.5, 0.5, 5.0), 10), TruncationError);
  CHECK_NOTHROW(conditional_oam_clean(delta_model(0.5, 0.5, 3.0), 15));
}

TEST_CASE("uncertainty is invariant under l -> -l") {
  OamDistribution d;
  d.lmax = 4;
  d.p = {0.05, 0.1, 0.0, 0.2, 0.3, 0.15, 0.1, 0.05, 0.05};
  OamDistribution r = d;
  std::reverse(r.p.begin(), r.p.end());
  CHECK(oam_uncertainty(d).value == doctest::Approx(oam_uncertainty(r).value).epsilon(1e-14));
}

TEST_CASE("delta-gaussian round trip") {
  const OamNoiseModel truth = delta_model(0.6, 0.1, 1.5);
  OamDistribution samples = model_values(truth, 15);
  SUBCASE("exact") {
    const OamFit fit = fit_oam_model(samples, OamForm::delta_gaussian);
    CHECK(fit.model.S0 == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(fit.model.N == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(fit.model.sigma_f == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(fit.diagnostics.rank == 3);
    CHECK(fit.diagnostics.parameter_names.size() == 3);
    CHECK(fit.diagnostics.covariance.rows() == 3);
  }
  SUBCASE("one percent noise") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (double& v : samples.p) v *= 1.0 + noise(rng);
    const OamFit fit = fit_oam_model(samples, OamForm::delta_gaussian);
    CHECK(fit.model.S0 == doctest::Approx(0.6).epsilon(0.05));
    CHECK(fit.model.N == doctest::Approx(0.1).epsilon(0.05));
    CHECK(fit.model.sigma_f == doctest::Approx(1.5).epsilon(0.05));
  }
  SUBCASE("deterministic") {
    const OamFit a = fit_oam_model(samples, OamForm::delta_gaussian);
    const OamFit b = fit_oam_model(samples, OamForm::delta_gaussian);
    CHECK(a.model.S0 == b.model.S0);
    CHECK(a.model.sigma_f == b.model.sigma_f);
  }
}

TEST_CASE("exp-gaussian round trip") {
  OamNoiseModel truth;
  truth.form = OamForm::exp_gaussian;
  truth.a = 0.5;
  truth.b = 0.8;
  truth.N = 0.02;
  truth.sigma_f = 4.0;
  const OamFit fit = fit_oam_model(model_values(truth, 15), OamForm::exp_gaussian);
  CHECK(fit.model.a == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(fit.model.b == doctest::Approx(0.8).epsilon(1e-4));
  CHECK(fit.model.N == doctest::Approx(0.02).epsilon(1e-3));
  CHECK(fit.model.sigma_f == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("all-zero off-peak counts") {
  OamDistribution d;
  d.lmax = 15;
  d.p.assign(31, 0.0);
  d(0) = 1.0;
  const OamFit fit = fit_oam_model(d, OamForm::delta_gaussian);
  CHECK(fit.model.S0 == 1.0);
  CHECK(fit.model.N == 0.0);
}

TEST_CASE("too few nonzero entries") {
  OamDistribution d;
  d.lmax = 15;
  d.p.assign(31, 0.0);
  for (int l = -2; l <= 2; ++l) d(l) = 1.0 / (1 + l * l);
  CHECK_THROWS_AS(fit_oam_model(d, OamForm::delta_gaussian), DataError);
  d.p.assign(31, 0.0);
  CHECK_THROWS_AS(fit_oam_model(d, OamForm::exp_gaussian), DataError);
}

TEST_CASE("rank of a Jacobian with collinear columns") {
  Eigen::MatrixXd J(5, 3);
  J << 1, 2, 1e-6, 2, 4, 0, 3, 6, 1, 4, 8, 0, 5, 10, 2;
  FitDiagnostics d;
  detail::fill_covariance(J, 1.0, d);
  CHECK(d.rank == 2);
  CHECK(d.covariance.allFinite());
}

TEST_CASE("clean joint state is anti-diagonal") {
  std::vector<double> weights(11);
  for (int l = -5; l <= 5; ++l) weights[static_cast<std::size_t>(l + 5)] = std::exp(-0.3 * std::abs(l));
  const Eigen::MatrixXd J = clean_joint_oam(weights, 5);
  for (int s = -5; s <= 5; ++s)
    for (int i = -5; i <= 5; ++i) {
      const double v = J(s + 5, i + 5);
      if (i == -s)
        CHECK(v == weights[static_cast<std::size_t>(s + 5)]);
      else
        CHECK(v == 0.0);
    }
}

TEST_CASE("csv") {
  std::ostringstream out;
  write_csv(out, conditional_oam_clean(delta_model(1.0, 0.0, 1.0), 2));
  CHECK(out.str() == "l,probability\n-2,0\n-1,0\n0,1\n1,0\n2,0\n");
}

TEST_CASE("exp-gaussian conditional distribution") {
  OamNoiseModel m;
  m.form = OamForm::exp_gaussian;
  m.a = 1.0;
  m.b = 1.2;
  const OamDistribution d = conditional_oam_clean(m);
  const double rho = std::exp(-1.2);
  // two-sided geometric: variance 2ρ/(1−ρ)²
  CHECK(oam_uncertainty(d).value == doctest::Approx(std::sqrt(2 * rho) / (1 - rho)).epsilon(1e-6));
  m.b = 0.1;
  CHECK_THROWS_AS(conditional_oam_clean(m), TruncationError);
  m.b = 0.0;
  CHECK_THROWS_AS(conditional_oam_clean(m), TruncationError);
}
