#pragma once

// Separable filtering helpers shared by the alignment and metrics code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "spikekit/error.hpp"

namespace spikekit {

// Sampled Gaussian on [-radius, radius], normalized to sum 1.
inline std::vector<double> gaussian_taps(double sigma, std::size_t radius) {
  detail::require(sigma > 0.0, ErrorCode::kInvalidArgument, "gaussian sigma must be positive");
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double x = static_cast<double>(i) - static_cast<double>(radius);
    taps[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Symmetric separable filter, replicate-edge padding, same-size output.
inline std::vector<double> filter_replicate(std::span<const double> src, std::size_t width, std::size_t height,
                                            std::span<const double> taps) {
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  std::vector<double> tmp(src.size()), out(src.size());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        acc += taps[static_cast<std::size_t>(k + r)] * src[static_cast<std::size_t>(y * w + std::clamp(x + k, std::ptrdiff_t{0}, w - 1))];
      }
      tmp[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        acc += taps[static_cast<std::size_t>(k + r)] * tmp[static_cast<std::size_t>(std::clamp(y + k, std::ptrdiff_t{0}, h - 1) * w + x)];
      }
      out[static_cast<std::size_t>(y * w + x)] = acc;
    }
  }
  return out;
}

// Separable filter over the valid region only: output is
// (width - 2r) x (height - 2r), row-major.
inline std::vector<double> filter_valid(std::span<const double> src, std::size_t width, std::size_t height,
                                        std::span<const double> taps) {
  const std::size_t n = taps.size();
  const std::size_t ow = width - n + 1;
  const std::size_t oh = height - n + 1;
  std::vector<double> tmp(height * ow), out(oh * ow);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += taps[k] * src[y * width + x + k];
      tmp[y * ow + x] = acc;
    }
  }
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += taps[k] * tmp[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace spikekit
