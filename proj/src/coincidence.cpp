#include "revival/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "revival/errors.hpp"

namespace revival {

namespace {

constexpr double pi = std::numbers::pi;

using BinCounts = std::vector<std::pair<std::uint32_t, std::int64_t>>;

BinCounts frame_bins(std::span<const PixelEvent> frame, const std::vector<std::uint32_t>& lookup) {
  BinCounts out;
  out.reserve(frame.size());
  for (const PixelEvent& e : frame) out.emplace_back(lookup[e.pixel], e.count);
  std::sort(out.begin(), out.end());
  std::size_t w = 0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (w > 0 && out[w - 1].first == out[r].first)
      out[w - 1].second += out[r].second;
    else
      out[w++] = out[r];
  }
  out.resize(w);
  return out;
}

CoincidenceMap accumulate(const FrameStack& stack, const std::vector<std::uint32_t>& lookup,
                          std::size_t bins) {
  const std::size_t n = stack.frame_count();
  if (n < 2) throw DataError("coincidence counting needs at least two frames");
  std::vector<std::int64_t> same(bins * bins, 0), adjacent(bins * bins, 0);
  BinCounts cur = frame_bins(stack.frame(0), lookup);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    BinCounts next = frame_bins(stack.frame(k + 1), lookup);
    for (const auto& [p, np] : cur) {
      for (const auto& [q, nq] : cur) same[p * bins + q] += np * nq;
      for (const auto& [q, nq] : next) adjacent[p * bins + q] += np * nq;
    }
    cur = std::move(next);
  }
  CoincidenceMap map;
  map.frame_pairs = n - 1;
  const auto b = static_cast<Eigen::Index>(bins);
  map.true_term.resize(b, b);
  map.accidental.resize(b, b);
  const double m = static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = 0; j < b; ++j) {
      map.true_term(i, j) = static_cast<double>(same[static_cast<std::size_t>(i * b + j)]) / m;
      map.accidental(i, j) = static_cast<double>(adjacent[static_cast<std::size_t>(i * b + j)]) / m;
    }
  map.net = map.true_term - map.accidental;
  return map;
}

}  // namespace

CoincidenceValue coincidence_series(std::span<const std::int64_t> np,
                                    std::span<const std::int64_t> nq) {
  if (np.size() != nq.size()) throw DomainError("pixel series lengths differ");
  if (np.size() < 2) throw DataError("coincidence counting needs at least two frames");
  const std::size_t m = np.size() - 1;
  std::int64_t same = 0, adjacent = 0;
  for (std::size_t k = 0; k < m; ++k) {
    same += np[k] * nq[k];
    adjacent += np[k] * nq[k + 1];
  }
  CoincidenceValue v;
  v.frame_pairs = m;
  const double md = static_cast<double>(m);
  v.true_term = static_cast<double>(same) / md;
  v.accidental = static_cast<double>(adjacent) / md;
  v.net = v.true_term - v.accidental;
  double var = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double x = static_cast<double>(np[k] * nq[k] - np[k] * nq[k + 1]) - v.net;
    var += x * x;
  }
  v.standard_error = m > 1 ? std::sqrt(var / (md - 1.0) / md) : 0.0;
  return v;
}

CoincidenceValue coincidence_pixels(const FrameStack& stack, std::uint32_t p_col,
                                    std::uint32_t p_row, std::uint32_t q_col, std::uint32_t q_row) {
  const FrameGeometry& g = stack.geometry();
  if (p_col >= g.width || q_col >= g.width || p_row >= g.height || q_row >= g.height)
    throw DomainError("pixel outside the sensor");
  std::vector<std::int64_t> np(stack.frame_count()), nq(stack.frame_count());
  for (std::size_t k = 0; k < stack.frame_count(); ++k) {
    np[k] = stack.count(k, p_col, p_row);
    nq[k] = stack.count(k, q_col, q_row);
  }
  return coincidence_series(np, nq);
}

CoincidenceMap coincidence_strips(const FrameStack& stack, std::uint32_t strip_height) {
  const FrameGeometry& g = stack.geometry();
  if (strip_height == 0 || g.height % strip_height != 0)
    throw DataError("strip height must divide the sensor height");
  const std::size_t bins = g.height / strip_height;
  std::vector<std::uint32_t> lookup(static_cast<std::size_t>(g.width) * g.height);
  for (std::uint32_t row = 0; row < g.height; ++row)
    std::fill_n(lookup.begin() + static_cast<std::ptrdiff_t>(row) * g.width, g.width, row / strip_height);
  CoincidenceMap map = accumulate(stack, lookup, bins);
  map.kind = MapKind::strips;
  for (std::size_t s = 0; s < bins; ++s)
    map.coords.push_back(((static_cast<double>(s) + 0.5) * strip_height - g.center_y()) *
                         g.object_pixel());
  return map;
}

CoincidenceMap coincidence_sectors(const FrameStack& stack, std::size_t n_sectors,
                                   double center_x, double center_y, double angle_offset) {
  const FrameGeometry& g = stack.geometry();
  if (n_sectors < 8) throw DomainError("need at least 8 sectors");
  if (!(center_x > 0.0 && center_x < g.width && center_y > 0.0 && center_y < g.height))
    throw DomainError("sector center must lie strictly inside the sensor");
  const double step = 2.0 * pi / static_cast<double>(n_sectors);
  std::vector<std::uint32_t> lookup(static_cast<std::size_t>(g.width) * g.height);
  for (std::uint32_t row = 0; row < g.height; ++row)
    for (std::uint32_t col = 0; col < g.width; ++col) {
      const double theta = std::atan2(row + 0.5 - center_y, col + 0.5 - center_x);
      double t = std::fmod(theta - angle_offset + pi, 2.0 * pi);
      if (t < 0.0) t += 2.0 * pi;
      const auto s = std::min(static_cast<std::size_t>(t / step), n_sectors - 1);
      lookup[static_cast<std::size_t>(row) * g.width + col] = static_cast<std::uint32_t>(s);
    }
  CoincidenceMap map = accumulate(stack, lookup, n_sectors);
  map.kind = MapKind::sectors;
  for (std::size_t s = 0; s < n_sectors; ++s)
    map.coords.push_back(-pi + (static_cast<double>(s) + 0.5) * step + angle_offset);
  return map;
}

void write_csv(std::ostream& out, const CoincidenceMap& map) {
  out << "i,j,coord_i,coord_j,true,accidental,net,excluded\n";
  out.precision(17);
  for (std::size_t i = 0; i < map.bins(); ++i)
    for (std::size_t j = 0; j < map.bins(); ++j) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      out << i << ',' << j << ',' << map.coords[i] << ',' << map.coords[j] << ','
          << map.true_term(a, b) << ',' << map.accidental(a, b) << ',' << map.net(a, b) << ','
          << (map.excluded(i, j) ? 1 : 0) << '\n';
    }
}

}  // namespace revival
