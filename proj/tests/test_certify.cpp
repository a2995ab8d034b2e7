#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "revival/certify.hpp"
#include "revival/errors.hpp"

using namespace revival;

namespace {

const ExperimentParams P = reference_params();
const double dp = conditional_momentum_sigma(P).value;

}  // namespace

TEST_CASE("position-momentum product") {
  const EprProduct e = epr_product(Basis::position_momentum, P, 0.0, dp);
  CHECK(e.product == doctest::Approx(conditional_position_sigma(P, 0.0).value * dp).epsilon(1e-14));
  CHECK(e.product == doctest::Approx(0.0223).epsilon(0.01));
  CHECK(e.entangled);
  CHECK(e.first.unit == Unit::meter);
  CHECK(e.second.unit == Unit::hbar_per_meter);
  CHECK(epr_product(Basis::position_momentum, P, 0.01, dp).entangled);
  CHECK_FALSE(epr_product(Basis::position_momentum, P, 0.05, dp).entangled);
  CHECK_FALSE(epr_product(Basis::position_momentum, P, 1.0, dp).entangled);
  double prev = 0.0;
  for (double z : {0.0, 1e-3, 1e-2, 0.05, 0.2, 1.0}) {
    const double v = epr_product(Basis::position_momentum, P, z, dp).product;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("a literal product") {
  const EprProduct e = epr_product(Basis::angle_oam, P, 1e-3, 0.72);
  CHECK(e.product == doctest::Approx(e.first.value * 0.72).epsilon(1e-15));
  CHECK(e.second.value == 0.72);
  CHECK(e.second.unit == Unit::hbar);
  CHECK(e.first.unit == Unit::radian);
  CHECK(e.entangled == (e.product < 0.5));
}

TEST_CASE("missing measured value is a configuration error") {
  CHECK_THROWS_AS(epr_product(Basis::angle_oam, P, 0.1, std::nullopt), ConfigError);
  CHECK_THROWS_AS(epr_product(Basis::position_momentum, P, 0.1, std::nullopt), ConfigError);
}

TEST_CASE("turbulent product uses the ensemble beyond the plane") {
  const TurbulenceParams t = make_turbulence(P, 0.15, 0.125e-3);
  EprSettings s;
  s.angle.n_theta = 128;
  s.sampling.n_theta = 128;
  const EprProduct before = epr_product(Basis::angle_oam, P, 0.1, 0.94, t, s);
  CHECK(before.first.method == Method::quadrature);
  const EprProduct after = epr_product(Basis::angle_oam, P, 0.5, 0.94, t, s);
  CHECK(after.first.method == Method::monte_carlo);
  CHECK(after.first.value > epr_product(Basis::angle_oam, P, 0.5, 0.94, std::nullopt, s).first.value);
}

TEST_CASE("synthetic scan crossings") {
  const std::vector<double> zs = log_spaced(1e-3, 1.0, 30);
  CHECK(zs.front() == doctest::Approx(1e-3));
  CHECK(zs.back() == doctest::Approx(1.0));
  // rises through 0.5 at 0.01 and falls back at 0.2
  const auto f = [](double z) { return 0.5 + (z - 0.01) * (0.2 - z); };
  const ScanResult r = scan(f, zs, 1e-6);
  REQUIRE(r.crossings.size() == 2);
  CHECK(r.crossings[0].kind == CrossingKind::loss);
  CHECK(r.crossings[0].z == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(r.crossings[1].kind == CrossingKind::revival);
  CHECK(r.crossings[1].z == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(r.product.size() == zs.size());
  CHECK(scan(f, zs, 1e-6, 3).crossings[1].z == r.crossings[1].z);
  CHECK(scan([](double) { return 0.1; }, zs).crossings.empty());
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 10), DomainError);
  CHECK_THROWS_AS(log_spaced(1.0, 0.5, 10), DomainError);
  CHECK_THROWS_AS(log_spaced(0.1, 1.0, 1), DomainError);
  CHECK_THROWS_AS(scan(f, {0.2, 0.1}), DomainError);
}

TEST_CASE("clean revival") {
  EprSettings s;
  s.angle.n_theta = 128;
  const ScanResult r = find_revival(P, std::nullopt, 0.72, 1e-3, 1.0, 40, s);
  REQUIRE(r.crossings.size() == 2);
  CHECK(r.crossings[0].kind == CrossingKind::loss);
  CHECK(r.crossings[1].kind == CrossingKind::revival);
  const double zr = r.crossings[1].z;
  CHECK(zr == doctest::Approx(0.22).epsilon(0.10));
  CHECK(zr == doctest::Approx(far_field_revival(P, 0.72)).epsilon(0.05));
  CHECK(far_field_revival(P, 0.72) == doctest::Approx(0.2245609646419314).epsilon(1e-12));
  const ScanResult again = find_revival(P, std::nullopt, 0.72, 1e-3, 1.0, 40, s, 3);
  CHECK(again.crossings[1].z == zr);
  CHECK(again.product == r.product);
}
