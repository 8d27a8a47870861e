#pragma once

// Dense frame reconstruction from spike streams.
//
// TFI (texture from interval) maps the inter-spike interval d to v_th / d.
// TFP (texture from playback) maps the spike count N in a trailing window of
// w steps to N / w * c.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/spike_model.hpp"
#include "spikekit/spike_stream.hpp"

namespace spikekit {

// Per-pixel step counts; `defined` is false for pixels without a spike yet.
struct LatencyMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> latency;
  std::vector<bool> defined;
};

struct ReconstructedFrame {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
};

inline constexpr double kTfpScale8Bit = 255.0;

namespace detail {

inline void check_step(const SpikeStream& stream, std::size_t t) {
  require(t < stream.t_count(), ErrorCode::kOutOfRange,
          "step " + std::to_string(t) + " outside stream of " + std::to_string(stream.t_count()) + " frames");
}

}  // namespace detail

// Steps elapsed since the most recent spike at or before t, counted
// inclusively: a spike at t itself gives 1.
inline LatencyMap latency_at(const SpikeStream& stream, std::size_t t) {
  detail::check_step(stream, t);
  LatencyMap out{stream.width(), stream.height(), std::vector<std::uint32_t>(stream.pixels(), 0),
                 std::vector<bool>(stream.pixels(), false)};
  for (std::size_t p = 0; p < stream.pixels(); ++p) {
    for (std::size_t s = t + 1; s-- > 0;) {
      if (stream.get(s, p)) {
        out.latency[p] = static_cast<std::uint32_t>(t - s + 1);
        out.defined[p] = true;
        break;
      }
    }
  }
  return out;
}

// Length of the latest complete inter-spike interval ending at or before t.
// Stream start acts as a spike at step -1 (the accumulator begins empty), so a
// first spike at step k closes an interval of k + 1.
inline LatencyMap interval_at(const SpikeStream& stream, std::size_t t) {
  detail::check_step(stream, t);
  LatencyMap out{stream.width(), stream.height(), std::vector<std::uint32_t>(stream.pixels(), 0),
                 std::vector<bool>(stream.pixels(), false)};
  for (std::size_t p = 0; p < stream.pixels(); ++p) {
    std::size_t s = t + 1;
    while (s-- > 0 && !stream.get(s, p)) {
    }
    if (s > t) continue;  // wrapped: no spike in [0, t]
    const std::size_t last = s;
    std::ptrdiff_t prev = -1;
    for (std::size_t q = last; q-- > 0;) {
      if (stream.get(q, p)) {
        prev = static_cast<std::ptrdiff_t>(q);
        break;
      }
    }
    out.latency[p] = static_cast<std::uint32_t>(static_cast<std::ptrdiff_t>(last) - prev);
    out.defined[p] = true;
  }
  return out;
}

// v_th / d with d the latest inter-spike interval; 0 where no spike occurred.
inline ReconstructedFrame tfi(const SpikeStream& stream, std::size_t t, const SimulatorConfig& cfg) {
  cfg.validate();
  const LatencyMap d = interval_at(stream, t);
  ReconstructedFrame out{stream.width(), stream.height(), std::vector<double>(stream.pixels(), 0.0)};
  for (std::size_t p = 0; p < out.values.size(); ++p) {
    if (d.defined[p]) out.values[p] = cfg.v_th / static_cast<double>(d.latency[p]);
  }
  return out;
}

// Trailing window [max(0, t - w + 1), t]; near the stream start the count is
// renormalized by the clipped window length.
inline ReconstructedFrame tfp(const SpikeStream& stream, std::size_t t, std::size_t window, double scale) {
  detail::check_step(stream, t);
  detail::require(window >= 1, ErrorCode::kInvalidArgument, "TFP window must be at least 1");
  detail::require(scale > 0.0, ErrorCode::kInvalidArgument, "TFP scale must be positive");
  const std::size_t first = t + 1 >= window ? t + 1 - window : 0;
  const double w_eff = static_cast<double>(t + 1 - first);

  std::vector<std::uint32_t> counts(stream.pixels(), 0);
  for (std::size_t s = first; s <= t; ++s) {
    const auto bits = stream.frame(s);
    for (std::size_t p = 0; p < counts.size(); ++p) counts[p] += (bits[p / 8] >> (7 - p % 8)) & 1u;
  }
  ReconstructedFrame out{stream.width(), stream.height(), std::vector<double>(stream.pixels())};
  for (std::size_t p = 0; p < counts.size(); ++p) out.values[p] = counts[p] / w_eff * scale;
  return out;
}

}  // namespace spikekit
