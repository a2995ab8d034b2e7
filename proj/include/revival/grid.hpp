#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace revival {

/// Uniform, strictly increasing sample positions start + i·step, i < size.
struct UniformAxis {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  double operator[](std::size_t i) const { return start + step * static_cast<double>(i); }
  double back() const { return (*this)[size - 1]; }

  /// `n` points on [-half_width, half_width), so index n/2 sits exactly on 0.
  static UniformAxis centered(double half_width, std::size_t n);
  /// `n` points on [-π, π) with step 2π/n.
  static UniformAxis periodic_angle(std::size_t n);
};

/// Sampled nonnegative function of two coordinates, stored row-major over
/// axis1 (values[i * axis2.size + j] = f(axis1[i], axis2[j])).
class JointDistribution2D {
 public:
  JointDistribution2D() = default;
  JointDistribution2D(UniformAxis axis1, UniformAxis axis2, std::vector<double> values);

  const UniformAxis& axis1() const { return axis1_; }
  const UniformAxis& axis2() const { return axis2_; }
  std::span<const double> values() const { return values_; }
  bool max_normalized() const { return max_normalized_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * axis2_.size + j]; }

  /// Values along axis1 for fixed axis2 index j.
  std::vector<double> column(std::size_t j) const;

  /// Rescales so the maximum equals exactly one.
  void normalize_max();

 private:
  UniformAxis axis1_;
  UniformAxis axis2_;
  std::vector<double> values_;
  bool max_normalized_ = false;
};

/// CSV with header `axis1,axis2,value`, row-major over axis1.
void write_csv(std::ostream& out, const JointDistribution2D& dist);

/// Mean and standard deviation of a sampled density on a uniform axis.
struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};
Moments sampled_moments(const UniformAxis& axis, std::span<const double> weights);

/// Standard deviation of a sampled 2π-periodic density about its peak,
/// taking offsets in [peak − window, peak + window] (window ≤ π).
double circular_stddev(const UniformAxis& angles, std::span<const double> weights,
                       double window);

}  // namespace revival
