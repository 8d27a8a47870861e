#pragma once

// Integrate-and-fire spike camera model.
//
// Each pixel integrates intensity into an accumulator. When the accumulated
// charge reaches v_th the pixel emits a spike and keeps the charge modulo
// v_th. A step emits at most one spike, even if the charge exceeds 2 * v_th.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/image.hpp"
#include "spikekit/parallel.hpp"
#include "spikekit/spike_stream.hpp"

namespace spikekit {

struct SimulatorConfig {
  double v_th = 1.0;

  void validate() const {
    detail::require(std::isfinite(v_th) && v_th > 0.0, ErrorCode::kInvalidArgument,
                    "v_th must be positive and finite");
  }
};

// Charge within this fraction of v_th below the threshold counts as reaching
// it. Absorbs rounding in sums such as ten steps of 0.1 without affecting
// inputs on any 8-bit or dyadic grid.
inline constexpr double kThresholdSnap = 1e-9;

class IntensityFrame {
 public:
  IntensityFrame() = default;

  IntensityFrame(std::size_t width, std::size_t height, std::vector<double> values)
      : extent_{width, height}, values_(std::move(values)) {
    detail::require(width > 0 && height > 0, ErrorCode::kInvalidArgument, "frame dimensions must be positive");
    detail::require(values_.size() == extent_.pixels(), ErrorCode::kDimensionMismatch,
                    "frame has " + std::to_string(values_.size()) + " values, expected " +
                        std::to_string(extent_.pixels()));
    for (double v : values_) {
      detail::require(std::isfinite(v) && v >= 0.0, ErrorCode::kInvalidArgument,
                      "intensities must be finite and non-negative");
    }
  }

  static IntensityFrame uniform(std::size_t width, std::size_t height, double value) {
    return IntensityFrame(width, height, std::vector<double>(width * height, value));
  }

  // Single-channel image, unit-float domain.
  static IntensityFrame from_image(const Image& image) {
    detail::require(image.channels() == 1, ErrorCode::kInvalidArgument,
                    "intensity frames need a single-channel image; convert RGB to grayscale first");
    const auto plane = image.plane(0);
    return IntensityFrame(image.width(), image.height(), std::vector<double>(plane.begin(), plane.end()));
  }

  std::size_t width() const noexcept { return extent_.width; }
  std::size_t height() const noexcept { return extent_.height; }
  Extent extent() const noexcept { return extent_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t pixel) const noexcept { return values_[pixel]; }

  friend bool operator==(const IntensityFrame&, const IntensityFrame&) = default;

 private:
  Extent extent_;
  std::vector<double> values_;
};

class IntensitySequence {
 public:
  IntensitySequence() = default;

  explicit IntensitySequence(std::vector<IntensityFrame> frames) : frames_(std::move(frames)) {
    detail::require(!frames_.empty(), ErrorCode::kInvalidArgument, "intensity sequence must have at least one frame");
    for (const auto& f : frames_) {
      detail::require(f.extent() == frames_.front().extent(), ErrorCode::kDimensionMismatch,
                      "sequence frames differ in size: " + to_string(f.extent()) + " vs " +
                          to_string(frames_.front().extent()));
    }
  }

  static IntensitySequence repeat(const IntensityFrame& frame, std::size_t t_count) {
    return IntensitySequence(std::vector<IntensityFrame>(t_count, frame));
  }

  std::size_t t_count() const noexcept { return frames_.size(); }
  Extent extent() const noexcept { return frames_.empty() ? Extent{} : frames_.front().extent(); }
  const IntensityFrame& operator[](std::size_t t) const noexcept { return frames_[t]; }
  const std::vector<IntensityFrame>& frames() const noexcept { return frames_; }

 private:
  std::vector<IntensityFrame> frames_;
};

class AccumulatorState {
 public:
  AccumulatorState() = default;

  AccumulatorState(std::size_t width, std::size_t height, std::vector<double> residuals)
      : extent_{width, height}, residuals_(std::move(residuals)) {
    detail::require(residuals_.size() == extent_.pixels(), ErrorCode::kDimensionMismatch,
                    "accumulator has " + std::to_string(residuals_.size()) + " residuals, expected " +
                        std::to_string(extent_.pixels()));
  }

  static AccumulatorState zeros(Extent extent) {
    return AccumulatorState(extent.width, extent.height, std::vector<double>(extent.pixels(), 0.0));
  }

  Extent extent() const noexcept { return extent_; }
  std::span<const double> residuals() const noexcept { return residuals_; }
  std::span<double> residuals() noexcept { return residuals_; }

  // Throws unless every residual lies in [0, v_th).
  void validate(const SimulatorConfig& cfg) const {
    for (double r : residuals_) {
      detail::require(std::isfinite(r) && r >= 0.0 && r < cfg.v_th, ErrorCode::kInvalidArgument,
                      "accumulator residual " + std::to_string(r) + " outside [0, v_th)");
    }
  }

  friend bool operator==(const AccumulatorState&, const AccumulatorState&) = default;

 private:
  Extent extent_;
  std::vector<double> residuals_;
};

struct SimulationResult {
  SpikeStream stream;
  AccumulatorState state;
};

namespace detail {

// One pixel, one step. Returns the spike bit and updates the residual in place.
inline bool integrate(double& residual, double intensity, double v_th) noexcept {
  const double charge = residual + intensity;
  if (charge >= v_th) {
    residual = std::fmod(charge, v_th);  // exact; equals charge - v_th below 2 * v_th
    return true;
  }
  if (charge >= v_th * (1.0 - kThresholdSnap)) {
    residual = 0.0;
    return true;
  }
  residual = charge;
  return false;
}

inline void run_frames(std::span<const IntensityFrame> frames, std::span<double> residuals, double v_th,
                       SpikeStream& out) {
  const std::size_t n = residuals.size();
  // Byte-aligned pixel chunks: no two workers touch the same output byte.
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = 0; t < frames.size(); ++t) {
          const auto in = frames[t].values();
          std::span<std::uint8_t> bits = out.frame(t);
          for (std::size_t p = begin; p < end; ++p) {
            if (integrate(residuals[p], in[p], v_th)) bits[p / 8] |= static_cast<std::uint8_t>(0x80u >> (p % 8));
          }
        }
      },
      8, (1u << 16) / std::max<std::size_t>(frames.size(), 1));
}

}  // namespace detail

inline SimulationResult simulate(const IntensitySequence& seq, const SimulatorConfig& cfg,
                                 const std::optional<AccumulatorState>& init = std::nullopt) {
  cfg.validate();
  detail::require(seq.t_count() >= 1, ErrorCode::kInvalidArgument, "intensity sequence is empty");
  AccumulatorState state = init ? *init : AccumulatorState::zeros(seq.extent());
  detail::require(state.extent() == seq.extent(), ErrorCode::kDimensionMismatch,
                  "initial state " + to_string(state.extent()) + " does not match sequence " +
                      to_string(seq.extent()));
  state.validate(cfg);

  SpikeStream stream(seq.extent().width, seq.extent().height, seq.t_count());
  detail::run_frames(seq.frames(), state.residuals(), cfg.v_th, stream);
  return {std::move(stream), std::move(state)};
}

// Streaming form: one frame in, one spike frame out.
inline SimulationResult simulate_step(const AccumulatorState& state, const IntensityFrame& frame,
                                      const SimulatorConfig& cfg) {
  cfg.validate();
  detail::require(state.extent() == frame.extent(), ErrorCode::kDimensionMismatch,
                  "state " + to_string(state.extent()) + " does not match frame " + to_string(frame.extent()));
  state.validate(cfg);
  AccumulatorState next = state;
  SpikeStream stream(frame.width(), frame.height(), 1);
  detail::run_frames(std::span(&frame, 1), next.residuals(), cfg.v_th, stream);
  return {std::move(stream), std::move(next)};
}

struct CalibratedSequence {
  IntensitySequence sequence;
  double scale = 0.0;
  // Some scaled pixels exceeded v_th and were clamped just below it.
  bool clamped = false;
};

// Replicates a static image t_count times, scaled so the long-run firing rate
// averaged over pixels equals `target`.
inline CalibratedSequence calibrate_coverage(const IntensityFrame& image, std::size_t t_count, double target,
                                             const SimulatorConfig& cfg) {
  cfg.validate();
  detail::require(t_count >= 1, ErrorCode::kInvalidArgument, "t_count must be at least 1");
  detail::require(target > 0.0 && target < 1.0, ErrorCode::kInvalidArgument, "target coverage must lie in (0, 1)");
  double sum = 0.0;
  for (double v : image.values()) sum += v;
  detail::require(sum > 0.0, ErrorCode::kInvalidArgument, "image has no positive pixel; coverage scale undefined");
  const double mean = sum / static_cast<double>(image.values().size());

  CalibratedSequence out;
  out.scale = target * cfg.v_th / mean;
  const double ceiling = std::nextafter(cfg.v_th, 0.0);
  std::vector<double> scaled(image.values().size());
  for (std::size_t p = 0; p < scaled.size(); ++p) {
    scaled[p] = image[p] * out.scale;
    if (scaled[p] > cfg.v_th) {
      scaled[p] = ceiling;
      out.clamped = true;
    }
  }
  out.sequence = IntensitySequence::repeat(IntensityFrame(image.width(), image.height(), std::move(scaled)), t_count);
  return out;
}

}  // namespace spikekit
