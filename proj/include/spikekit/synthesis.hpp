#pragma once

// Synthetic dual-modality data: frame-average blur, motion-blur kernels,
// grayscale and color fade, modality mixing ratios and latent mixing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/image.hpp"
#include "spikekit/parallel.hpp"
#include "spikekit/rng.hpp"

namespace spikekit {

inline constexpr std::size_t kDefaultKernelSize = 40;
inline constexpr std::size_t kDefaultKernelCount = 8;

// Square correlation kernel. The anchor is (size / 2, size / 2), which is the
// exact center for odd sizes.
class BlurKernel {
 public:
  BlurKernel() = default;

  BlurKernel(std::size_t size, std::vector<double> weights) : size_(size), weights_(std::move(weights)) {
    detail::require(size >= 1, ErrorCode::kInvalidArgument, "kernel size must be at least 1");
    detail::require(weights_.size() == size * size, ErrorCode::kDimensionMismatch,
                    "kernel needs " + std::to_string(size * size) + " weights");
    double sum = 0.0;
    for (double w : weights_) {
      detail::require(std::isfinite(w) && w >= 0.0, ErrorCode::kInvalidArgument, "kernel weights must be >= 0");
      sum += w;
    }
    detail::require(sum > 0.0, ErrorCode::kInvalidArgument, "kernel weights sum to zero");
    for (double& w : weights_) w /= sum;
  }

  static BlurKernel delta(std::size_t size) {
    std::vector<double> w(size * size, 0.0);
    w[(size / 2) * size + size / 2] = 1.0;
    return BlurKernel(size, std::move(w));
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t anchor() const noexcept { return size_ / 2; }
  double at(std::size_t row, std::size_t col) const noexcept { return weights_[row * size_ + col]; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::size_t size_ = 0;
  std::vector<double> weights_;
};

// Line segment of `length` samples through the kernel center at `angle`
// radians (counter-clockwise from the +x axis, y up), splatted bilinearly.
inline BlurKernel motion_blur_kernel(std::size_t length, double angle, std::size_t size = kDefaultKernelSize) {
  detail::require(length >= 1, ErrorCode::kInvalidArgument, "motion blur length must be at least 1");
  detail::require(length <= size, ErrorCode::kInvalidArgument,
                  "motion blur length " + std::to_string(length) + " exceeds kernel size " + std::to_string(size));
  std::vector<double> w(size * size, 0.0);
  const double center = static_cast<double>(size - 1) / 2.0;
  const double dx = std::cos(angle);
  const double dy = -std::sin(angle);
  auto snap = [](double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
  };
  for (std::size_t k = 0; k < length; ++k) {
    const double offset = static_cast<double>(k) - static_cast<double>(length - 1) / 2.0;
    const double x = std::clamp(snap(center + offset * dx), 0.0, static_cast<double>(size - 1));
    const double y = std::clamp(snap(center + offset * dy), 0.0, static_cast<double>(size - 1));
    const auto x0 = static_cast<std::size_t>(std::floor(x));
    const auto y0 = static_cast<std::size_t>(std::floor(y));
    const double fx = x - static_cast<double>(x0);
    const double fy = y - static_cast<double>(y0);
    const std::size_t x1 = std::min(x0 + 1, size - 1);
    const std::size_t y1 = std::min(y0 + 1, size - 1);
    w[y0 * size + x0] += (1 - fx) * (1 - fy);
    w[y0 * size + x1] += fx * (1 - fy);
    w[y1 * size + x0] += (1 - fx) * fy;
    w[y1 * size + x1] += fx * fy;
  }
  return BlurKernel(size, std::move(w));
}

// `count` random motion kernels with length uniform in [1, size] and angle
// uniform in [0, pi).
inline std::vector<BlurKernel> motion_kernel_bank(CounterRng& rng, std::size_t count = kDefaultKernelCount,
                                                  std::size_t size = kDefaultKernelSize) {
  detail::require(count >= 1, ErrorCode::kInvalidArgument, "kernel count must be at least 1");
  std::vector<BlurKernel> bank;
  bank.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto length = static_cast<std::size_t>(rng.uniform_int(1, size));
    const double angle = rng.uniform() * std::numbers::pi;
    bank.push_back(motion_blur_kernel(length, angle, size));
  }
  return bank;
}

inline const BlurKernel& pick_kernel(std::span<const BlurKernel> bank, CounterRng& rng) {
  detail::require(!bank.empty(), ErrorCode::kInvalidArgument, "kernel bank is empty");
  return bank[static_cast<std::size_t>(rng.uniform_int(0, bank.size() - 1))];
}

// 2-D correlation with replicate-edge padding, per channel.
inline Image convolve(const Image& image, const BlurKernel& kernel) {
  detail::require(kernel.size() <= image.width() && kernel.size() <= image.height(), ErrorCode::kInvalidArgument,
                  "kernel size " + std::to_string(kernel.size()) + " exceeds image " + shape_string(image));
  struct Tap {
    std::ptrdiff_t dy, dx;
    double w;
  };
  std::vector<Tap> taps;
  const auto a = static_cast<std::ptrdiff_t>(kernel.anchor());
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    for (std::size_t j = 0; j < kernel.size(); ++j) {
      if (kernel.at(i, j) != 0.0) {
        taps.push_back({static_cast<std::ptrdiff_t>(i) - a, static_cast<std::ptrdiff_t>(j) - a, kernel.at(i, j)});
      }
    }
  }
  const auto h = static_cast<std::ptrdiff_t>(image.height());
  const auto w = static_cast<std::ptrdiff_t>(image.width());
  Image out(image.width(), image.height(), image.channels());
  for (std::size_t c = 0; c < image.channels(); ++c) {
    const auto src = image.plane(c);
    auto dst = out.plane(c);
    parallel_for(
        image.height(),
        [&](std::size_t y0, std::size_t y1) {
          for (auto y = static_cast<std::ptrdiff_t>(y0); y < static_cast<std::ptrdiff_t>(y1); ++y) {
            for (std::ptrdiff_t x = 0; x < w; ++x) {
              double acc = 0.0;
              for (const Tap& tap : taps) {
                const std::ptrdiff_t sy = std::clamp<std::ptrdiff_t>(y + tap.dy, 0, h - 1);
                const std::ptrdiff_t sx = std::clamp<std::ptrdiff_t>(x + tap.dx, 0, w - 1);
                acc += tap.w * src[static_cast<std::size_t>(sy * w + sx)];
              }
              dst[static_cast<std::size_t>(y * w + x)] = static_cast<float>(acc);
            }
          }
        },
        1, 16);
  }
  return out;
}

// Per-pixel arithmetic mean, accumulated in double.
inline Image average_blur(std::span<const Image> frames) {
  detail::require(!frames.empty(), ErrorCode::kInvalidArgument, "average_blur needs at least one frame");
  std::vector<double> acc(frames.front().size(), 0.0);
  for (const Image& f : frames) {
    detail::require_same_shape(f, frames.front(), "average_blur");
    const auto v = f.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  const auto n = static_cast<double>(frames.size());
  std::vector<float> mean(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) mean[i] = static_cast<float>(acc[i] / n);
  const Image& f0 = frames.front();
  return Image(f0.width(), f0.height(), f0.channels(), std::move(mean));
}

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

// BT.601 luma.
inline Image grayscale(const Image& rgb) {
  detail::require(rgb.channels() == 3, ErrorCode::kInvalidArgument, "grayscale expects an RGB image");
  Image out(rgb.width(), rgb.height(), 1);
  const auto r = rgb.plane(0), g = rgb.plane(1), b = rgb.plane(2);
  auto dst = out.plane(0);
  for (std::size_t p = 0; p < rgb.pixels(); ++p) {
    dst[p] = static_cast<float>(kLumaR * r[p] + kLumaG * g[p] + kLumaB * b[p]);
  }
  return out;
}

class MixRatio {
 public:
  constexpr MixRatio() = default;
  explicit MixRatio(double gamma) : gamma_(gamma) {
    detail::require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::kInvalidArgument,
                    "mix ratio " + std::to_string(gamma) + " outside [0, 1]");
  }
  constexpr double value() const noexcept { return gamma_; }

 private:
  double gamma_ = 0.0;
};

// (1 - gamma) * clear + gamma * gray, with gray broadcast to all three channels.
inline Image color_fade(const Image& clear, MixRatio gamma) {
  detail::require(clear.channels() == 3, ErrorCode::kInvalidArgument, "color_fade expects an RGB image");
  const Image gray = grayscale(clear);
  const double g = gamma.value();
  Image out(clear.width(), clear.height(), 3);
  const auto luma = gray.plane(0);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto src = clear.plane(c);
    auto dst = out.plane(c);
    for (std::size_t p = 0; p < clear.pixels(); ++p) {
      dst[p] = static_cast<float>((1.0 - g) * src[p] + g * luma[p]);
    }
  }
  return out;
}

inline constexpr double kGammaMean = 0.5;
inline constexpr double kGammaStddev = 1.0;

// How a N(0.5, 1) draw is confined to [0, 1]. Clamping keeps point masses at
// both ends (pure single-modality samples); rejection redraws until inside.
enum class Truncation { kClamp, kReject };

inline MixRatio sample_gamma(CounterRng& rng, Truncation mode = Truncation::kClamp) {
  double x = kGammaMean + kGammaStddev * rng.normal();
  if (mode == Truncation::kReject) {
    while (x < 0.0 || x > 1.0) x = kGammaMean + kGammaStddev * rng.normal();
    return MixRatio(x);
  }
  return MixRatio(std::clamp(x, 0.0, 1.0));
}

class LatentVector {
 public:
  LatentVector() = default;
  explicit LatentVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      detail::require(std::isfinite(v), ErrorCode::kInvalidArgument, "latent values must be finite");
    }
  }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const LatentVector&, const LatentVector&) = default;

 private:
  std::vector<double> values_;
};

inline LatentVector mix_latents(const LatentVector& z_rgb, const LatentVector& z_spike, MixRatio gamma) {
  detail::require(z_rgb.size() == z_spike.size(), ErrorCode::kDimensionMismatch,
                  "latent lengths differ: " + std::to_string(z_rgb.size()) + " vs " + std::to_string(z_spike.size()));
  const double g = gamma.value();
  std::vector<double> mixed(z_rgb.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i] = (1.0 - g) * z_rgb[i] + g * z_spike[i];
  return LatentVector(std::move(mixed));
}

}  // namespace spikekit
