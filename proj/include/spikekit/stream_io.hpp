#pragma once

// File formats.
//
// SPKS spike container, all integers little-endian:
//   offset 0  magic "SPKS"
//          4  u16 version (1)
//          6  u16 flags (bit 0: v_th present)
//          8  u32 width
//         12  u32 height
//         16  u32 t_count
//         20  f32 v_th (only when flag bit 0 is set)
//   then t_count frames of ceil(width * height / 8) bytes each, laid out as in
//   SpikeStream. Frame t starts at header_size + t * frame_bytes.
//
// Images: binary PGM (P5) / PPM (P6) with maxval 255, and SPKF raw float
// ("SPKF", u32 width, u32 height, u32 channels, then planar f32 LE).

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/image.hpp"
#include "spikekit/spike_stream.hpp"

namespace spikekit {

inline constexpr std::uint16_t kSpksVersion = 1;
inline constexpr std::uint16_t kSpksFlagVth = 0x1;
inline constexpr std::size_t kSpksHeaderSize = 20;
inline constexpr std::size_t kSpkfHeaderSize = 16;

namespace detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  std::vector<std::uint8_t>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    require(remaining() >= n, ErrorCode::kTruncated,
            std::string(what) + ": expected " + std::to_string(pos_ + n) + " bytes, got " + std::to_string(in_.size()));
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint16_t u16(const char* what) {
    auto s = take(2, what);
    return static_cast<std::uint16_t>(s[0] | (s[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    auto s = take(4, what);
    return std::uint32_t{s[0]} | (std::uint32_t{s[1]} << 8) | (std::uint32_t{s[2]} << 16) | (std::uint32_t{s[3]} << 24);
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
  require(v <= std::numeric_limits<std::uint32_t>::max(), ErrorCode::kInvalidArgument,
          std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

inline bool starts_with(std::span<const std::uint8_t> bytes, std::string_view magic) {
  return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
}

}  // namespace detail

inline std::vector<std::uint8_t> save_spks(const SpikeStream& stream, std::optional<float> v_th = std::nullopt) {
  detail::require(!stream.empty(), ErrorCode::kInvalidArgument, "cannot save an empty spike stream");
  std::vector<std::uint8_t> out;
  out.reserve(kSpksHeaderSize + 4 + stream.bytes().size());
  detail::ByteWriter w(out);
  w.bytes("SPKS");
  w.u16(kSpksVersion);
  w.u16(v_th ? kSpksFlagVth : 0);
  w.u32(detail::checked_u32(stream.width(), "width"));
  w.u32(detail::checked_u32(stream.height(), "height"));
  w.u32(detail::checked_u32(stream.t_count(), "t_count"));
  if (v_th) w.f32(*v_th);
  out.insert(out.end(), stream.bytes().begin(), stream.bytes().end());
  return out;
}

struct LoadedStream {
  SpikeStream stream;
  std::optional<float> v_th;
};

inline LoadedStream load_spks(std::span<const std::uint8_t> bytes, PaddingPolicy policy = PaddingPolicy::kStrict) {
  detail::ByteReader r(bytes);
  detail::require(bytes.size() >= 4 && detail::starts_with(bytes, "SPKS"), ErrorCode::kBadMagic,
                  "input does not start with \"SPKS\"");
  r.take(4, "magic");
  const std::uint16_t version = r.u16("header");
  detail::require(version == kSpksVersion, ErrorCode::kUnsupportedVersion,
                  "version " + std::to_string(version) + " (supported: 1)");
  const std::uint16_t flags = r.u16("header");
  detail::require((flags & ~kSpksFlagVth) == 0, ErrorCode::kMalformedHeader,
                  "unknown flag bits 0x" + std::to_string(flags & ~kSpksFlagVth));
  const std::uint32_t width = r.u32("header");
  const std::uint32_t height = r.u32("header");
  const std::uint32_t t_count = r.u32("header");
  detail::require(width >= 1 && height >= 1 && t_count >= 1, ErrorCode::kMalformedHeader,
                  "width, height and t_count must be at least 1");
  LoadedStream out;
  if (flags & kSpksFlagVth) {
    out.v_th = r.f32("header");
    detail::require(std::isfinite(*out.v_th) && *out.v_th > 0.0f, ErrorCode::kMalformedHeader,
                    "stored v_th must be positive and finite");
  }
  const std::uint64_t frame_bytes = (std::uint64_t{width} * height + 7) / 8;
  const std::uint64_t payload = frame_bytes * t_count;
  detail::require(r.remaining() <= payload, ErrorCode::kMalformedHeader,
                  std::to_string(r.remaining() - payload) + " trailing bytes after payload");
  const auto data = r.take(static_cast<std::size_t>(payload), "payload");
  out.stream = SpikeStream::from_packed(width, height, t_count, std::vector<std::uint8_t>(data.begin(), data.end()),
                                        policy);
  return out;
}

// Byte-domain export: round half away from zero, clamp to [0, 255].
inline std::uint8_t to_byte(double unit) noexcept {
  const double scaled = unit * 255.0;
  if (!(scaled > 0.0)) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(scaled));
}

inline float from_byte(std::uint8_t b) noexcept { return static_cast<float>(b / 255.0); }

// P5 for grayscale, P6 for RGB.
inline std::vector<std::uint8_t> save_pnm(const Image& image) {
  const std::string header = std::string(image.channels() == 1 ? "P5" : "P6") + "\n" + std::to_string(image.width()) +
                             " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.size());
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      for (std::size_t c = 0; c < image.channels(); ++c) out.push_back(to_byte(image.at(c, y, x)));
    }
  }
  return out;
}

inline Image load_pnm(std::span<const std::uint8_t> bytes) {
  detail::require(bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'),
                  ErrorCode::kBadMagic, "not a binary PGM/PPM file");
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  auto next_field = [&]() -> std::uint64_t {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    detail::require(pos < bytes.size() && std::isdigit(bytes[pos]), ErrorCode::kMalformedHeader,
                    "expected a decimal header field at byte " + std::to_string(pos));
    std::uint64_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      detail::require(v < (1ull << 32), ErrorCode::kMalformedHeader, "header field too large");
    }
    return v;
  };
  const auto width = next_field();
  const auto height = next_field();
  const auto maxval = next_field();
  detail::require(width >= 1 && height >= 1, ErrorCode::kMalformedHeader, "image dimensions must be positive");
  detail::require(width <= bytes.size() && height <= bytes.size(), ErrorCode::kTruncated,
                  "image dimensions exceed the file size");
  detail::require(maxval == 255, ErrorCode::kUnsupportedMaxval,
                  "maxval " + std::to_string(maxval) + " (only 255 is supported)");
  detail::require(pos < bytes.size() && std::isspace(bytes[pos]), ErrorCode::kMalformedHeader,
                  "missing whitespace after maxval");
  ++pos;
  const std::uint64_t need = width * height * channels;
  detail::require(bytes.size() - pos >= need, ErrorCode::kTruncated,
                  "expected " + std::to_string(need) + " sample bytes, got " + std::to_string(bytes.size() - pos));
  Image img(width, height, channels);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) img.at(c, y, x) = from_byte(bytes[pos++]);
    }
  }
  return img;
}

inline std::vector<std::uint8_t> save_spkf(const Image& image) {
  std::vector<std::uint8_t> out;
  out.reserve(kSpkfHeaderSize + 4 * image.size());
  detail::ByteWriter w(out);
  w.bytes("SPKF");
  w.u32(detail::checked_u32(image.width(), "width"));
  w.u32(detail::checked_u32(image.height(), "height"));
  w.u32(static_cast<std::uint32_t>(image.channels()));
  for (float v : image.values()) w.f32(v);
  return out;
}

inline Image load_spkf(std::span<const std::uint8_t> bytes) {
  detail::require(detail::starts_with(bytes, "SPKF"), ErrorCode::kBadMagic, "input does not start with \"SPKF\"");
  detail::ByteReader r(bytes);
  r.take(4, "magic");
  const std::uint32_t width = r.u32("header");
  const std::uint32_t height = r.u32("header");
  const std::uint32_t channels = r.u32("header");
  detail::require(width >= 1 && height >= 1 && (channels == 1 || channels == 3), ErrorCode::kMalformedHeader,
                  "invalid SPKF dimensions");
  const std::uint64_t count = std::uint64_t{width} * height * channels;
  detail::require(r.remaining() >= count * 4, ErrorCode::kTruncated,
                  "expected " + std::to_string(kSpkfHeaderSize + count * 4) + " bytes, got " +
                      std::to_string(bytes.size()));
  std::vector<float> values(count);
  for (auto& v : values) {
    v = r.f32("payload");
    detail::require(std::isfinite(v), ErrorCode::kMalformedHeader, "non-finite sample in SPKF payload");
  }
  return Image(width, height, channels, std::move(values));
}

enum class ImageFormat { kPnm, kSpkf };

// By extension: ".spkf" is raw float, anything else is PGM/PPM.
inline ImageFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".spkf" ? ImageFormat::kSpkf : ImageFormat::kPnm;
}

inline std::vector<std::uint8_t> save_image(const Image& image, ImageFormat format) {
  return format == ImageFormat::kSpkf ? save_spkf(image) : save_pnm(image);
}

// Format detected from the leading magic bytes.
inline Image load_image(std::span<const std::uint8_t> bytes) {
  if (detail::starts_with(bytes, "SPKF")) return load_spkf(bytes);
  return load_pnm(bytes);
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::require(!in.bad(), ErrorCode::kIo, "read failed for " + path.string());
  return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  detail::require(static_cast<bool>(out), ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  detail::require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + path.string());
}

inline Image load_image_file(const std::filesystem::path& path) { return load_image(read_file(path)); }

inline void save_image_file(const Image& image, const std::filesystem::path& path) {
  write_file(path, save_image(image, format_for_path(path)));
}

inline LoadedStream load_spks_file(const std::filesystem::path& path, PaddingPolicy policy = PaddingPolicy::kStrict) {
  return load_spks(read_file(path), policy);
}

inline void save_spks_file(const SpikeStream& stream, const std::filesystem::path& path,
                           std::optional<float> v_th = std::nullopt) {
  write_file(path, save_spks(stream, v_th));
}

}  // namespace spikekit
