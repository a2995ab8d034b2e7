#include "revival/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "revival/errors.hpp"

namespace revival {

UniformAxis UniformAxis::centered(double half_width, std::size_t n) {
  if (n < 2 || !(half_width > 0.0)) throw DomainError("axis needs n >= 2 and half_width > 0");
  const double step = 2.0 * half_width / static_cast<double>(n);
  return {-step * static_cast<double>(n / 2), step, n};
}

UniformAxis UniformAxis::periodic_angle(std::size_t n) {
  if (n < 2) throw DomainError("angle axis needs n >= 2");
  return {-std::numbers::pi, 2.0 * std::numbers::pi / static_cast<double>(n), n};
}

JointDistribution2D::JointDistribution2D(UniformAxis axis1, UniformAxis axis2,
                                         std::vector<double> values)
    : axis1_(axis1), axis2_(axis2), values_(std::move(values)) {
  if (values_.size() != axis1_.size * axis2_.size)
    throw DomainError("value count does not match axis sizes");
  if (std::any_of(values_.begin(), values_.end(), [](double v) { return !(v >= 0.0); }))
    throw DomainError("joint distribution values must be nonnegative");
}

std::vector<double> JointDistribution2D::column(std::size_t j) const {
  std::vector<double> out(axis1_.size);
  for (std::size_t i = 0; i < axis1_.size; ++i) out[i] = (*this)(i, j);
  return out;
}

void JointDistribution2D::normalize_max() {
  const double peak = *std::max_element(values_.begin(), values_.end());
  if (!(peak > 0.0)) throw DomainError("cannot max-normalize an all-zero distribution");
  for (double& v : values_) v /= peak;
  max_normalized_ = true;
}

void write_csv(std::ostream& out, const JointDistribution2D& dist) {
  out << "axis1,axis2,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < dist.axis1().size; ++i)
    for (std::size_t j = 0; j < dist.axis2().size; ++j)
      out << dist.axis1()[i] << ',' << dist.axis2()[j] << ',' << dist(i, j) << '\n';
}

Moments sampled_moments(const UniformAxis& axis, std::span<const double> weights) {
  double total = 0.0, first = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    first += weights[i] * axis[i];
  }
  if (!(total > 0.0)) throw DomainError("moments of an all-zero density");
  const double mean = first / total;
  double second = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = axis[i] - mean;
    second += weights[i] * d * d;
  }
  return {mean, std::sqrt(second / total)};
}

double circular_stddev(const UniformAxis& angles, std::span<const double> weights,
                       double window) {
  constexpr double pi = std::numbers::pi;
  const auto peak_it = std::max_element(weights.begin(), weights.end());
  const double peak = angles[static_cast<std::size_t>(peak_it - weights.begin())];
  double total = 0.0, second = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double d = std::fmod(angles[i] - peak + pi, 2.0 * pi);
    if (d < 0.0) d += 2.0 * pi;
    d -= pi;  // d in [-π, π)
    if (std::abs(d) > window) continue;
    total += weights[i];
    second += weights[i] * d * d;
  }
  if (!(total > 0.0)) throw DomainError("circular moments of an all-zero density");
  return std::sqrt(second / total);
}

}  // namespace revival
