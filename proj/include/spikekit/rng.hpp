#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, position), so any element of
// a computation can be regenerated independently of evaluation order. This is
// what makes parallel synthesis schedule-independent.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace spikekit {

using Block = std::array<std::uint32_t, 4>;

class Philox4x32 {
 public:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static constexpr Block generate(Block counter, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * counter[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                 static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }
};

// [0, 1) with 32 bits of resolution.
constexpr double to_unit32(std::uint32_t x) noexcept { return x * 0x1.0p-32; }

// [0, 1) with 53 bits of resolution, built from two 32-bit lanes.
constexpr double to_unit53(std::uint32_t hi, std::uint32_t lo) noexcept {
  return static_cast<double>((std::uint64_t{hi} >> 5) * 67108864u + (lo >> 6)) * 0x1.0p-53;
}

// A keyed Philox stream. Cheap to copy; copies replay the same sequence.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }
  constexpr std::uint64_t position() const noexcept { return position_; }

  // Independent substream, e.g. one per dataset sample.
  constexpr CounterRng split(std::uint64_t stream) const noexcept { return CounterRng(seed_, stream); }

  // Pure keyed access: no state is touched.
  constexpr Block block_at(std::uint64_t position) const noexcept {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(position), static_cast<std::uint32_t>(position >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  }

  // The 32-bit lane for element `index` when four elements share a block.
  constexpr std::uint32_t lane_at(std::uint64_t index) const noexcept {
    return block_at(index >> 2)[index & 3u];
  }

  constexpr Block next_block() noexcept { return block_at(position_++); }

  double uniform() noexcept {
    const Block b = next_block();
    return to_unit53(b[0], b[1]);
  }

  // Standard normal by Box-Muller; consumes one block per draw.
  double normal() noexcept {
    const Block b = next_block();
    const double u1 = to_unit53(b[0], b[1]);
    const double u2 = to_unit53(b[2], b[3]);
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    const Block b = next_block();
    const std::uint64_t span = hi - lo + 1;
    const std::uint64_t x = (std::uint64_t{b[0]} << 32) | b[1];
    return span == 0 ? x : lo + x % span;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
};

}  // namespace spikekit
