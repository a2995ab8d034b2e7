#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "revival/errors.hpp"
#include "revival/frames.hpp"

namespace revival {

namespace {

constexpr std::array<char, 8> magic{'S', 'P', 'D', 'C', 'F', 'R', 'M', '1'};
constexpr std::size_t header_size = 56;

template <class T>
void put(unsigned char* dst, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<unsigned char>(bits >> (8 * i));
}

template <class T>
T get(const unsigned char* src) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(U{src[i]} << (8 * i));
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_stack(const FrameStack& stack, std::ostream& out) {
  const FrameGeometry& g = stack.geometry();
  if (stack.frame_count() > std::numeric_limits<std::uint32_t>::max())
    throw DomainError("too many frames for the file format");
  std::array<unsigned char, header_size> header{};
  std::memcpy(header.data(), magic.data(), magic.size());
  put(header.data() + 8, g.width);
  put(header.data() + 12, g.height);
  put(header.data() + 16, static_cast<std::uint32_t>(stack.frame_count()));
  put(header.data() + 20, std::uint32_t{0});
  put(header.data() + 24, g.pixel_pitch);
  put(header.data() + 32, g.magnification);
  put(header.data() + 40, stack.info().z);
  put(header.data() + 48, stack.info().seed);
  out.write(reinterpret_cast<const char*>(header.data()), header_size);

  const std::size_t npix = static_cast<std::size_t>(g.width) * g.height;
  std::vector<unsigned char> buffer(2 * npix);
  for (std::size_t k = 0; k < stack.frame_count(); ++k) {
    std::fill(buffer.begin(), buffer.end(), 0);
    for (const PixelEvent& e : stack.frame(k)) put(buffer.data() + 2 * e.pixel, e.count);
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  }
  if (!out) throw Error("failed to write frame stack");
}

void write_stack(const FrameStack& stack, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_stack(stack, out);
}

FrameStack read_stack(std::istream& in) {
  std::array<unsigned char, header_size> header{};
  in.read(reinterpret_cast<char*>(header.data()), header_size);
  const auto got = static_cast<std::uint64_t>(in.gcount());
  if (got < magic.size() || std::memcmp(header.data(), magic.data(), magic.size()) != 0)
    throw FormatError("bad magic", 0);
  if (got < header_size) throw FormatError("truncated header", got);

  FrameGeometry g;
  g.width = get<std::uint32_t>(header.data() + 8);
  g.height = get<std::uint32_t>(header.data() + 12);
  const auto frames = get<std::uint32_t>(header.data() + 16);
  if (g.width == 0) throw FormatError("zero width", 8);
  if (g.height == 0) throw FormatError("zero height", 12);
  if (get<std::uint32_t>(header.data() + 20) != 0) throw FormatError("reserved field not zero", 20);
  g.pixel_pitch = get<double>(header.data() + 24);
  if (!(g.pixel_pitch > 0.0)) throw FormatError("pixel pitch must be positive", 24);
  g.magnification = get<double>(header.data() + 32);
  if (!(g.magnification > 0.0)) throw FormatError("magnification must be positive", 32);
  GenerationInfo info;
  info.z = get<double>(header.data() + 40);
  info.seed = get<std::uint64_t>(header.data() + 48);

  const std::uint64_t npix = std::uint64_t{g.width} * g.height;
  if (npix > std::numeric_limits<std::uint32_t>::max())
    throw FormatError("frame dimensions overflow", 8);

  FrameStack stack(g, info);
  std::vector<unsigned char> buffer(2 * npix);
  std::uint64_t offset = header_size;
  for (std::uint32_t k = 0; k < frames; ++k) {
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
    const auto n = static_cast<std::uint64_t>(in.gcount());
    if (n < buffer.size()) throw FormatError("truncated payload", offset + n);
    std::vector<PixelEvent> events;
    for (std::uint32_t p = 0; p < npix; ++p) {
      const auto c = get<std::uint16_t>(buffer.data() + 2 * std::size_t{p});
      if (c != 0) events.push_back({p, c});
    }
    stack.append_frame(std::move(events));
    offset += n;
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload", offset);
  return stack;
}

FrameStack read_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_stack(in);
}

}  // namespace revival
