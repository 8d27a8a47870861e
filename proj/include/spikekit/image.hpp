#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spikekit/error.hpp"

namespace spikekit {

struct Extent {
  std::size_t width = 0;
  std::size_t height = 0;

  constexpr std::size_t pixels() const noexcept { return width * height; }
  friend constexpr bool operator==(const Extent&, const Extent&) = default;
};

inline std::string to_string(Extent e) {
  return std::to_string(e.width) + "x" + std::to_string(e.height);
}

// Planar raster of unit-float samples (channel, row, column). 8-bit data maps
// as byte / 255. Raw float files may carry values outside [0, 1]; operations
// that need the unit domain say so.
class Image {
 public:
  Image() = default;

  Image(std::size_t width, std::size_t height, std::size_t channels, float fill = 0.0f)
      : Image(width, height, channels, std::vector<float>(width * height * channels, fill)) {}

  Image(std::size_t width, std::size_t height, std::size_t channels, std::vector<float> values)
      : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
    detail::require(width > 0 && height > 0, ErrorCode::kInvalidArgument, "image dimensions must be positive");
    detail::require(channels == 1 || channels == 3, ErrorCode::kInvalidArgument,
                    "image must have 1 or 3 channels, got " + std::to_string(channels));
    detail::require(values_.size() == width * height * channels, ErrorCode::kDimensionMismatch,
                    "value count " + std::to_string(values_.size()) + " does not match " +
                        std::to_string(width) + "x" + std::to_string(height) + "x" + std::to_string(channels));
    for (float v : values_) {
      detail::require(std::isfinite(v), ErrorCode::kInvalidArgument, "image values must be finite");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  std::size_t size() const noexcept { return values_.size(); }
  Extent extent() const noexcept { return {width_, height_}; }
  bool empty() const noexcept { return values_.empty(); }

  float& at(std::size_t c, std::size_t y, std::size_t x) { return values_[(c * height_ + y) * width_ + x]; }
  float at(std::size_t c, std::size_t y, std::size_t x) const { return values_[(c * height_ + y) * width_ + x]; }

  std::span<float> plane(std::size_t c) { return {values_.data() + c * pixels(), pixels()}; }
  std::span<const float> plane(std::size_t c) const { return {values_.data() + c * pixels(), pixels()}; }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> values_;
};

inline std::string shape_string(const Image& img) {
  return std::to_string(img.width()) + "x" + std::to_string(img.height()) + "x" + std::to_string(img.channels());
}

namespace detail {

inline void require_same_shape(const Image& a, const Image& b, const char* what) {
  require(a.same_shape(b), ErrorCode::kDimensionMismatch,
          std::string(what) + ": shapes " + shape_string(a) + " and " + shape_string(b) + " differ");
}

}  // namespace detail
}  // namespace spikekit
