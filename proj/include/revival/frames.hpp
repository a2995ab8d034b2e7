#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "revival/optics.hpp"

namespace revival {

struct FrameGeometry {
  std::uint32_t width = 512;
  std::uint32_t height = 512;
  double pixel_pitch = 16e-6;  ///< m
  double magnification = 1.0;
  double origin_x = -1.0;  ///< optical axis, in pixels; negative selects the sensor center
  double origin_y = -1.0;

  double center_x() const { return origin_x >= 0.0 ? origin_x : 0.5 * width; }
  double center_y() const { return origin_y >= 0.0 ? origin_y : 0.5 * height; }
  /// Object-plane length of one pixel.
  double object_pixel() const { return pixel_pitch / magnification; }
  void validate() const;
};

struct PixelEvent {
  std::uint32_t pixel = 0;  ///< row * width + col
  std::uint16_t count = 0;
  bool operator==(const PixelEvent&) const = default;
};

struct GenerationInfo {
  double z = 0.0;
  std::uint64_t seed = 0;
  double pair_rate = 0.0;
  double background_rate = 0.0;
  double qe = 1.0;
};

/// Photon-count frames stored sparsely: frame k owns
/// events[offsets[k] .. offsets[k+1]), sorted by pixel, counts > 0.
class FrameStack {
 public:
  FrameStack() = default;
  explicit FrameStack(FrameGeometry geometry, GenerationInfo info = {});

  const FrameGeometry& geometry() const { return geometry_; }
  const GenerationInfo& info() const { return info_; }
  std::size_t frame_count() const { return offsets_.size() - 1; }
  std::span<const PixelEvent> frame(std::size_t k) const;
  std::uint16_t count(std::size_t k, std::uint32_t col, std::uint32_t row) const;
  std::vector<std::uint16_t> dense_frame(std::size_t k) const;
  std::size_t event_count() const { return events_.size(); }

  /// Appends one frame; events are sorted and duplicate pixels merged.
  /// Throws DataError when a merged count exceeds 65535.
  void append_frame(std::vector<PixelEvent> events);
  /// Appends a dense row-major frame of width·height counts.
  void append_dense(std::span<const std::uint16_t> counts);

  bool operator==(const FrameStack& other) const;

 private:
  FrameGeometry geometry_;
  GenerationInfo info_;
  std::vector<std::size_t> offsets_{0};
  std::vector<PixelEvent> events_;
};

/// Draws photon-pair positions (x_s, y_s, x_i, y_i) in the object plane from
/// independent Gaussians in the sum and difference coordinates, optionally
/// adding an independent random displacement per photon and axis.
struct PairSampler {
  double w = 0.0;      ///< sum-coordinate width
  double sigma = 0.0;  ///< difference-coordinate width
  double kick = 0.0;   ///< per-photon displacement std (turbulence), 0 when clean

  static PairSampler clean(const ExperimentParams& params, double z);
  /// Tilt kicks of std 1/r at plane d displace each photon by N(0, ((z−d)/(k r))²).
  static PairSampler turbulent(const ExperimentParams& params, double d, double r, double z);

  struct Pair {
    double xs, ys, xi, yi;
  };
  Pair draw(std::mt19937_64& rng) const;
};

struct FrameSettings {
  std::size_t frames = 1;
  double pair_rate = 0.0;        ///< mean pairs per frame
  double background_rate = 0.0;  ///< mean background counts per pixel per frame
  double qe = 1.0;
  std::uint64_t seed = 1;
  double z = 0.0;  ///< metadata only
  unsigned workers = 1;
};

/// Frame k uses substream (seed, k), so the stack does not depend on the
/// worker count.
FrameStack generate_frames(const PairSampler& sampler, const FrameGeometry& geometry,
                           const FrameSettings& settings);

/// "SPDC frame stack v1" (dense little-endian u16 payload).
void write_stack(const FrameStack& stack, std::ostream& out);
void write_stack(const FrameStack& stack, const std::filesystem::path& path);
/// Throws FormatError with the byte offset of the first bad field.
FrameStack read_stack(std::istream& in);
FrameStack read_stack(const std::filesystem::path& path);

}  // namespace revival
