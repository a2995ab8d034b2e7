#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace revival {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical or physical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Sampling grid or index range too small to hold the distribution.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double lost_mass)
      : Error(what), lost_mass_(lost_mass) {}
  double lost_mass() const noexcept { return lost_mass_; }

 private:
  double lost_mass_;
};

/// Quadrature refinement or Monte Carlo sampling did not reach its target.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  /// The error level actually reached (relative change or standard error).
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Malformed frame-stack file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Not enough data, or data binned in a way the operation cannot use.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit that is degenerate or failed to converge.
class FitError : public Error {
 public:
  FitError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Bad or missing configuration key, or missing measured constant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace revival
