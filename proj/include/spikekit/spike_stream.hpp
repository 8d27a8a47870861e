#pragma once

// Bit-packed T x H x W binary spike tensor.
//
// Layout: frames in time order; within a frame pixels in row-major order,
// MSB-first within each byte. Every frame starts on a byte boundary and its
// trailing padding bits are zero, so frame t lives at byte t * frame_bytes().

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/image.hpp"

namespace spikekit {

enum class PaddingPolicy { kStrict, kLenient };

class SpikeStream {
 public:
  SpikeStream() = default;

  SpikeStream(std::size_t width, std::size_t height, std::size_t t_count)
      : width_(width), height_(height), t_count_(t_count) {
    detail::require(width > 0 && height > 0 && t_count > 0, ErrorCode::kInvalidArgument,
                    "spike stream dimensions must be positive");
    bits_.assign(t_count_ * frame_bytes(), 0);
  }

  // Adopts an already-packed payload. Lenient mode clears stray padding bits
  // instead of rejecting them.
  static SpikeStream from_packed(std::size_t width, std::size_t height, std::size_t t_count,
                                 std::vector<std::uint8_t> bytes, PaddingPolicy policy = PaddingPolicy::kStrict) {
    SpikeStream s(width, height, t_count);
    detail::require(bytes.size() == s.bits_.size(), ErrorCode::kTruncated,
                    "expected " + std::to_string(s.bits_.size()) + " payload bytes, got " +
                        std::to_string(bytes.size()));
    s.bits_ = std::move(bytes);
    const std::uint8_t mask = s.padding_mask();
    if (mask != 0) {
      for (std::size_t t = 0; t < t_count; ++t) {
        std::uint8_t& last = s.bits_[(t + 1) * s.frame_bytes() - 1];
        if (last & mask) {
          detail::require(policy == PaddingPolicy::kLenient, ErrorCode::kNonzeroPadding,
                          "frame " + std::to_string(t) + " has nonzero padding bits");
          last &= static_cast<std::uint8_t>(~mask);
        }
      }
    }
    return s;
  }

  // From one 0/1 byte per (t, pixel), t-major.
  static SpikeStream from_dense(std::size_t width, std::size_t height, std::size_t t_count,
                                std::span<const std::uint8_t> dense) {
    SpikeStream s(width, height, t_count);
    detail::require(dense.size() == t_count * s.pixels(), ErrorCode::kDimensionMismatch,
                    "dense buffer has " + std::to_string(dense.size()) + " elements, expected " +
                        std::to_string(t_count * s.pixels()));
    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t p = 0; p < s.pixels(); ++p) s.set(t, p, dense[t * s.pixels() + p] != 0);
    }
    return s;
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t t_count() const noexcept { return t_count_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  Extent extent() const noexcept { return {width_, height_}; }
  bool empty() const noexcept { return t_count_ == 0; }

  std::size_t frame_bytes() const noexcept { return (pixels() + 7) / 8; }

  bool get(std::size_t t, std::size_t pixel) const noexcept {
    return (bits_[t * frame_bytes() + pixel / 8] >> (7 - pixel % 8)) & 1u;
  }
  bool get(std::size_t t, std::size_t row, std::size_t col) const noexcept { return get(t, row * width_ + col); }

  void set(std::size_t t, std::size_t pixel, bool value) noexcept {
    std::uint8_t& byte = bits_[t * frame_bytes() + pixel / 8];
    const auto bit = static_cast<std::uint8_t>(0x80u >> (pixel % 8));
    byte = value ? static_cast<std::uint8_t>(byte | bit) : static_cast<std::uint8_t>(byte & ~bit);
  }
  void set(std::size_t t, std::size_t row, std::size_t col, bool value) noexcept { set(t, row * width_ + col, value); }

  std::span<const std::uint8_t> frame(std::size_t t) const {
    check_frame(t);
    return {bits_.data() + t * frame_bytes(), frame_bytes()};
  }
  std::span<std::uint8_t> frame(std::size_t t) {
    check_frame(t);
    return {bits_.data() + t * frame_bytes(), frame_bytes()};
  }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bits_; }

  std::size_t count_ones() const noexcept {
    std::size_t n = 0;
    for (std::uint8_t b : bits_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
  }

  // Appends the frames of `other`; an empty stream adopts other's extent.
  void append(const SpikeStream& other) {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    detail::require(extent() == other.extent(), ErrorCode::kDimensionMismatch,
                    "cannot append " + to_string(other.extent()) + " frames to a " + to_string(extent()) + " stream");
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    t_count_ += other.t_count_;
  }

  // One 0/1 byte per (t, pixel), t-major.
  std::vector<std::uint8_t> unpack() const {
    std::vector<std::uint8_t> dense(t_count_ * pixels());
    for (std::size_t t = 0; t < t_count_; ++t) {
      for (std::size_t p = 0; p < pixels(); ++p) dense[t * pixels() + p] = get(t, p) ? 1 : 0;
    }
    return dense;
  }

  friend bool operator==(const SpikeStream&, const SpikeStream&) = default;

 private:
  std::uint8_t padding_mask() const noexcept {
    const std::size_t used = pixels() % 8;
    return used == 0 ? 0 : static_cast<std::uint8_t>(0xFFu >> used);
  }

  void check_frame(std::size_t t) const {
    detail::require(t < t_count_, ErrorCode::kOutOfRange,
                    "frame " + std::to_string(t) + " outside stream of " + std::to_string(t_count_) + " frames");
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t t_count_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Fraction of set bits over all t_count * width * height positions.
inline double coverage(const SpikeStream& stream) noexcept {
  const std::size_t total = stream.t_count() * stream.pixels();
  return total == 0 ? 0.0 : static_cast<double>(stream.count_ones()) / static_cast<double>(total);
}

}  // namespace spikekit
