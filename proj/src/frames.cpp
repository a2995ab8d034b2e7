#include "revival/frames.hpp"

#include <algorithm>
#include <cmath>

#include "revival/errors.hpp"
#include "revival/parallel.hpp"

namespace revival {

void FrameGeometry::validate() const {
  if (width == 0 || height == 0) throw DomainError("sensor dimensions must be positive");
  if (!(pixel_pitch > 0.0) || !(magnification > 0.0))
    throw DomainError("pixel pitch and magnification must be positive");
}

FrameStack::FrameStack(FrameGeometry geometry, GenerationInfo info)
    : geometry_(geometry), info_(info) {
  geometry_.validate();
}

std::span<const PixelEvent> FrameStack::frame(std::size_t k) const {
  return std::span<const PixelEvent>(events_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

std::uint16_t FrameStack::count(std::size_t k, std::uint32_t col, std::uint32_t row) const {
  const auto f = frame(k);
  const std::uint32_t pixel = row * geometry_.width + col;
  const auto it = std::lower_bound(f.begin(), f.end(), pixel,
                                   [](const PixelEvent& e, std::uint32_t p) { return e.pixel < p; });
  return it != f.end() && it->pixel == pixel ? it->count : 0;
}

std::vector<std::uint16_t> FrameStack::dense_frame(std::size_t k) const {
  std::vector<std::uint16_t> out(static_cast<std::size_t>(geometry_.width) * geometry_.height, 0);
  for (const PixelEvent& e : frame(k)) out[e.pixel] = e.count;
  return out;
}

void FrameStack::append_frame(std::vector<PixelEvent> events) {
  const std::uint64_t npix = static_cast<std::uint64_t>(geometry_.width) * geometry_.height;
  std::sort(events.begin(), events.end(),
            [](const PixelEvent& a, const PixelEvent& b) { return a.pixel < b.pixel; });
  const std::size_t begin = events_.size();
  const auto fail = [&](auto error) {
    events_.resize(begin);
    throw error;
  };
  for (const PixelEvent& e : events) {
    if (e.pixel >= npix) fail(DomainError("pixel index outside the sensor"));
    if (e.count == 0) continue;
    if (events_.size() > begin && events_.back().pixel == e.pixel) {
      const std::uint32_t sum = std::uint32_t{events_.back().count} + e.count;
      if (sum > 0xFFFFu) fail(DataError("pixel count overflows 16 bits"));
      events_.back().count = static_cast<std::uint16_t>(sum);
    } else {
      events_.push_back(e);
    }
  }
  offsets_.push_back(events_.size());
}

void FrameStack::append_dense(std::span<const std::uint16_t> counts) {
  if (counts.size() != static_cast<std::size_t>(geometry_.width) * geometry_.height)
    throw DomainError("dense frame size does not match the sensor");
  for (std::size_t p = 0; p < counts.size(); ++p)
    if (counts[p] != 0) events_.push_back({static_cast<std::uint32_t>(p), counts[p]});
  offsets_.push_back(events_.size());
}

bool FrameStack::operator==(const FrameStack& other) const {
  const FrameGeometry& a = geometry_;
  const FrameGeometry& b = other.geometry_;
  return a.width == b.width && a.height == b.height && a.pixel_pitch == b.pixel_pitch &&
         a.magnification == b.magnification && info_.z == other.info_.z &&
         info_.seed == other.info_.seed && offsets_ == other.offsets_ && events_ == other.events_;
}

PairSampler PairSampler::clean(const ExperimentParams& params, double z) {
  const BeamWidths bw = beam_widths(params, z);
  return {bw.w_z, bw.sigma_z, 0.0};
}

PairSampler PairSampler::turbulent(const ExperimentParams& params, double d, double r, double z) {
  if (!(r > 0.0) || !(d >= 0.0)) throw DomainError("turbulence needs r > 0 and d >= 0");
  PairSampler s = clean(params, z);
  if (z > d) s.kick = (z - d) / (params.k * r);
  return s;
}

PairSampler::Pair PairSampler::draw(std::mt19937_64& rng) const {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double ux = w * unit(rng), vx = sigma * unit(rng);
  const double uy = w * unit(rng), vy = sigma * unit(rng);
  Pair p{0.5 * (ux + vx), 0.5 * (uy + vy), 0.5 * (ux - vx), 0.5 * (uy - vy)};
  if (kick > 0.0) {
    p.xs += kick * unit(rng);
    p.ys += kick * unit(rng);
    p.xi += kick * unit(rng);
    p.yi += kick * unit(rng);
  }
  return p;
}

namespace {

std::vector<PixelEvent> generate_one(const PairSampler& sampler, const FrameGeometry& g,
                                     const FrameSettings& s, std::size_t k) {
  std::mt19937_64 rng = substream(s.seed, k);
  std::vector<PixelEvent> events;
  const double scale = g.magnification / g.pixel_pitch;
  const double ox = g.center_x(), oy = g.center_y();
  const auto place = [&](double x, double y) {
    const double col = std::floor(ox + x * scale);
    const double row = std::floor(oy + y * scale);
    if (col < 0.0 || row < 0.0 || col >= g.width || row >= g.height) return;
    events.push_back({static_cast<std::uint32_t>(row) * g.width + static_cast<std::uint32_t>(col), 1});
  };
  if (s.pair_rate > 0.0) {
    const long pairs = std::poisson_distribution<long>(s.pair_rate)(rng);
    std::bernoulli_distribution detect(s.qe);
    for (long n = 0; n < pairs; ++n) {
      const PairSampler::Pair p = sampler.draw(rng);
      if (detect(rng)) place(p.xs, p.ys);
      if (detect(rng)) place(p.xi, p.yi);
    }
  }
  if (s.background_rate > 0.0) {
    const std::uint64_t npix = static_cast<std::uint64_t>(g.width) * g.height;
    const long count =
        std::poisson_distribution<long>(s.background_rate * static_cast<double>(npix))(rng);
    std::uniform_int_distribution<std::uint32_t> pixel(0, static_cast<std::uint32_t>(npix - 1));
    for (long n = 0; n < count; ++n) events.push_back({pixel(rng), 1});
  }
  return events;
}

}  // namespace

FrameStack generate_frames(const PairSampler& sampler, const FrameGeometry& geometry,
                           const FrameSettings& settings) {
  if (settings.frames < 1) throw DomainError("need at least one frame");
  if (settings.pair_rate < 0.0 || settings.background_rate < 0.0)
    throw DomainError("rates must be >= 0");
  if (!(settings.qe > 0.0) || settings.qe > 1.0) throw DomainError("qe must be in (0, 1]");
  geometry.validate();

  FrameStack stack(geometry, {settings.z, settings.seed, settings.pair_rate,
                              settings.background_rate, settings.qe});
  constexpr std::size_t block = 4096;
  std::vector<std::vector<PixelEvent>> pending;
  for (std::size_t first = 0; first < settings.frames; first += block) {
    const std::size_t n = std::min(block, settings.frames - first);
    pending.assign(n, {});
    parallel_chunks(n, settings.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        pending[i] = generate_one(sampler, geometry, settings, first + i);
    });
    for (auto& events : pending) stack.append_frame(std::move(events));
  }
  return stack;
}

}  // namespace revival
