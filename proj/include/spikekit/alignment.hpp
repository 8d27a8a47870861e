#pragma once

// Spike-alignment targets: a predicted grayscale image becomes a per-pixel
// firing probability map, which can be sampled into a synthetic spike stream
// and scored against a ground-truth stream.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/filter.hpp"
#include "spikekit/image.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/spike_stream.hpp"

namespace spikekit {

struct AlignConfig {
  double sigma_s = 1.0;     // Gaussian smoothing std in pixels; 0 disables smoothing
  double gamma_c = 1.0;     // gamma-correction exponent
  double noise_amp = 0.01;  // half-width of the additive uniform noise
  double eps = 1e-7;        // probability clamp inside the log loss

  void validate() const {
    detail::require(std::isfinite(sigma_s) && sigma_s >= 0.0, ErrorCode::kInvalidArgument, "sigma_s must be >= 0");
    detail::require(std::isfinite(gamma_c) && gamma_c > 0.0, ErrorCode::kInvalidArgument, "gamma_c must be > 0");
    detail::require(noise_amp >= 0.0 && noise_amp <= 0.5, ErrorCode::kInvalidArgument,
                    "noise amplitude must lie in [0, 0.5]");
    detail::require(eps > 0.0 && eps < 0.5, ErrorCode::kInvalidArgument, "eps must lie in (0, 0.5)");
  }
};

class ProbabilityMap {
 public:
  ProbabilityMap() = default;

  ProbabilityMap(std::size_t width, std::size_t height, std::vector<double> p)
      : extent_{width, height}, p_(std::move(p)) {
    detail::require(width > 0 && height > 0, ErrorCode::kInvalidArgument, "probability map must be non-empty");
    detail::require(p_.size() == extent_.pixels(), ErrorCode::kDimensionMismatch,
                    "probability map has " + std::to_string(p_.size()) + " values, expected " +
                        std::to_string(extent_.pixels()));
    for (double v : p_) {
      detail::require(v >= 0.0 && v <= 1.0, ErrorCode::kInvalidArgument, "probabilities must lie in [0, 1]");
    }
  }

  static ProbabilityMap uniform(std::size_t width, std::size_t height, double p) {
    return ProbabilityMap(width, height, std::vector<double>(width * height, p));
  }

  // Single-channel image values taken as probabilities.
  static ProbabilityMap from_image(const Image& image) {
    detail::require(image.channels() == 1, ErrorCode::kInvalidArgument, "probability map image must be grayscale");
    const auto v = image.plane(0);
    return ProbabilityMap(image.width(), image.height(), std::vector<double>(v.begin(), v.end()));
  }

  Image to_image() const {
    std::vector<float> v(p_.begin(), p_.end());
    return Image(extent_.width, extent_.height, 1, std::move(v));
  }

  std::size_t width() const noexcept { return extent_.width; }
  std::size_t height() const noexcept { return extent_.height; }
  Extent extent() const noexcept { return extent_; }
  std::span<const double> values() const noexcept { return p_; }
  double operator[](std::size_t pixel) const noexcept { return p_[pixel]; }

 private:
  Extent extent_;
  std::vector<double> p_;
};

// Intermediates are exposed for inspection and testing.
struct ProbabilityStages {
  std::vector<double> normalized;
  std::vector<double> smoothed;
  ProbabilityMap map;
};

// min-max normalize -> Gaussian smooth -> gamma correct -> uniform noise -> clamp.
// Noise for pixel i is keyed by rng.lane_at(i).
inline ProbabilityStages probability_stages(const Image& pred, const AlignConfig& cfg, const CounterRng& rng) {
  cfg.validate();
  detail::require(pred.channels() == 1, ErrorCode::kInvalidArgument,
                  "probability_map expects a grayscale image, got " + std::to_string(pred.channels()) + " channels");
  const auto src = pred.plane(0);
  const auto [lo_it, hi_it] = std::minmax_element(src.begin(), src.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  ProbabilityStages out;
  out.normalized.resize(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.normalized[i] = hi > lo ? (src[i] - lo) / (hi - lo) : 0.5;
  }

  if (cfg.sigma_s > 0.0) {
    const auto radius = static_cast<std::size_t>(std::ceil(3.0 * cfg.sigma_s));
    out.smoothed = filter_replicate(out.normalized, pred.width(), pred.height(), gaussian_taps(cfg.sigma_s, radius));
  } else {
    out.smoothed = out.normalized;
  }

  std::vector<double> p(src.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double v = cfg.gamma_c == 1.0 ? out.smoothed[i] : std::pow(std::max(out.smoothed[i], 0.0), cfg.gamma_c);
    if (cfg.noise_amp > 0.0) v += cfg.noise_amp * (2.0 * to_unit32(rng.lane_at(i)) - 1.0);
    p[i] = std::clamp(v, 0.0, 1.0);
  }
  out.map = ProbabilityMap(pred.width(), pred.height(), std::move(p));
  return out;
}

inline ProbabilityMap probability_map(const Image& pred, const AlignConfig& cfg, const CounterRng& rng) {
  return std::move(probability_stages(pred, cfg, rng).map);
}

// Independent Bernoulli(p) per pixel per frame; the draw for (t, pixel) is
// keyed by rng.lane_at(t * pixels + pixel).
inline SpikeStream sample_spikes(const ProbabilityMap& p, std::size_t t_count, const CounterRng& rng) {
  detail::require(t_count >= 1, ErrorCode::kInvalidArgument, "t_count must be at least 1");
  SpikeStream out(p.width(), p.height(), t_count);
  const std::size_t n = p.extent().pixels();
  for (std::size_t t = 0; t < t_count; ++t) {
    auto bits = out.frame(t);
    for (std::size_t i = 0; i < n; ++i) {
      if (to_unit32(rng.lane_at(t * n + i)) < p[i]) bits[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
  }
  return out;
}

namespace detail {

inline void require_match(const ProbabilityMap& p, const SpikeStream& gt) {
  require(p.extent() == gt.extent() && !gt.empty(), ErrorCode::kDimensionMismatch,
          "probability map " + to_string(p.extent()) + " does not match stream " + to_string(gt.extent()));
}

}  // namespace detail

// Mean binary cross-entropy over every (t, pixel), the map broadcast over time.
inline double alignment_loss(const ProbabilityMap& p, const SpikeStream& gt, double eps = AlignConfig{}.eps) {
  detail::require_match(p, gt);
  const std::size_t n = p.extent().pixels();
  std::vector<std::uint32_t> ones(n, 0);
  for (std::size_t t = 0; t < gt.t_count(); ++t) {
    for (std::size_t i = 0; i < n; ++i) ones[i] += gt.get(t, i);
  }
  // Per pixel the loss only depends on the spike count, so sum by count.
  double total = 0.0;
  const auto frames = static_cast<double>(gt.t_count());
  for (std::size_t i = 0; i < n; ++i) {
    const double q = std::clamp(p[i], eps, 1.0 - eps);
    total -= ones[i] * std::log(q) + (frames - ones[i]) * std::log1p(-q);
  }
  return total / (frames * static_cast<double>(n));
}

// Mean squared error between p and the per-pixel firing rate N / T.
inline double rate_loss(const ProbabilityMap& p, const SpikeStream& gt) {
  detail::require_match(p, gt);
  const std::size_t n = p.extent().pixels();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t t = 0; t < gt.t_count(); ++t) count += gt.get(t, i);
    const double diff = p[i] - static_cast<double>(count) / static_cast<double>(gt.t_count());
    total += diff * diff;
  }
  return total / static_cast<double>(n);
}

}  // namespace spikekit
