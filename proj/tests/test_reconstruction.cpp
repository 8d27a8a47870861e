#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spikekit/reconstruction.hpp"
#include "test_support.hpp"

namespace spikekit {
namespace {

SpikeStream single_pixel(std::size_t t_count, std::initializer_list<std::size_t> spikes) {
  SpikeStream s(1, 1, t_count);
  for (std::size_t t : spikes) s.set(t, 0, true);
  return s;
}

SpikeStream constant_stream(double intensity, std::size_t t_count, std::size_t side = 4) {
  return simulate(IntensitySequence::repeat(IntensityFrame::uniform(side, side, intensity), t_count), {1.0}).stream;
}

TEST(LatencyTest, SpikeAtQueryStepIsOne) {
  const auto m = latency_at(single_pixel(5, {2}), 2);
  EXPECT_TRUE(m.defined[0]);
  EXPECT_EQ(m.latency[0], 1u);
}

TEST(LatencyTest, ElapsedSinceLastSpike) {
  // Spikes at steps 4 and 7 (1-indexed); query step 6.
  const auto m = latency_at(single_pixel(8, {3, 6}), 5);
  EXPECT_EQ(m.latency[0], 3u);
}

TEST(LatencyTest, NoSpikeIsUndefined) {
  const auto m = latency_at(single_pixel(8, {6}), 5);
  EXPECT_FALSE(m.defined[0]);
  EXPECT_THROW(latency_at(single_pixel(8, {}), 8), Error);
}

TEST(IntervalTest, CountsFromStreamStartThenBetweenSpikes) {
  const auto s = single_pixel(10, {3, 6, 7});
  EXPECT_FALSE(interval_at(s, 2).defined[0]);
  EXPECT_EQ(interval_at(s, 3).latency[0], 4u);
  EXPECT_EQ(interval_at(s, 5).latency[0], 4u);
  EXPECT_EQ(interval_at(s, 6).latency[0], 3u);
  EXPECT_EQ(interval_at(s, 7).latency[0], 1u);
  EXPECT_EQ(interval_at(s, 9).latency[0], 1u);
}

TEST(TfiTest, DirectFormula) {
  // Consecutive spikes four steps apart, then adjacent spikes.
  const auto s = single_pixel(8, {3, 7});
  EXPECT_DOUBLE_EQ(tfi(s, 7, {1.0}).values[0], 0.25);
  EXPECT_DOUBLE_EQ(tfi(single_pixel(3, {0}), 0, {2.0}).values[0], 2.0);
  EXPECT_DOUBLE_EQ(tfi(single_pixel(3, {1, 2}), 2, {1.0}).values[0], 1.0);
  EXPECT_EQ(tfi(single_pixel(3, {}), 2, {1.0}).values[0], 0.0);
}

TEST(TfiTest, SteadyStateOfConstantIntensity) {
  const auto s = constant_stream(0.25, 64);
  for (std::size_t t = 3; t < 64; ++t) {
    for (double v : tfi(s, t, {1.0}).values) EXPECT_DOUBLE_EQ(v, 0.25);
  }
}

TEST(TfiTest, BracketAndRange) {
  for (double intensity : {0.05, 0.1, 0.3, 0.45, 0.7}) {
    const auto s = constant_stream(intensity, 200, 2);
    const double lo = 1.0 / std::ceil(1.0 / intensity);
    const double hi = 1.0 / std::floor(1.0 / intensity);
    for (auto t = static_cast<std::size_t>(std::ceil(1.0 / intensity)) - 1; t < 200; ++t) {
      for (double v : tfi(s, t, {1.0}).values) {
        EXPECT_GE(v, lo - 1e-15) << intensity << " @ " << t;
        EXPECT_LE(v, hi + 1e-15) << intensity << " @ " << t;
      }
    }
  }
  std::mt19937_64 gen(1);
  const auto r = testing::random_stream(gen, 5, 5, 30, 0.3);
  for (std::size_t t = 0; t < 30; ++t) {
    for (double v : tfi(r, t, {1.5}).values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.5);
    }
  }
}

TEST(TfpTest, DirectFormula) {
  const auto s = single_pixel(10, {1, 4, 8});
  EXPECT_DOUBLE_EQ(tfp(s, 9, 10, 255.0).values[0], 76.5);
  EXPECT_EQ(tfp(single_pixel(10, {}), 9, 10, 255.0).values[0], 0.0);
}

TEST(TfpTest, ClippedWindowRenormalizes) {
  const auto s = single_pixel(10, {0, 2});
  EXPECT_DOUBLE_EQ(tfp(s, 2, 10, 1.0).values[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(tfp(s, 9, 5, 1.0).values[0], 0.0);
}

TEST(TfpTest, ConstantIntensityUnbiased) {
  const auto s = constant_stream(0.3, 300);
  for (std::size_t t = 99; t < 300; t += 7) {
    for (double v : tfp(s, t, 100, 1.0).values) EXPECT_LE(std::abs(v - 0.3), 0.01 + 1e-12);
  }
}

TEST(TfpTest, LinearInScaleAndBounded) {
  std::mt19937_64 gen(2);
  const auto s = testing::random_stream(gen, 6, 4, 40, 0.4);
  for (std::size_t t : {0u, 5u, 39u}) {
    const auto unit = tfp(s, t, 16, 1.0);
    for (double c : {0.5, 3.0, 255.0}) {
      const auto scaled = tfp(s, t, 16, c);
      for (std::size_t p = 0; p < unit.values.size(); ++p) {
        EXPECT_EQ(scaled.values[p], unit.values[p] * c);
        EXPECT_GE(scaled.values[p], 0.0);
        EXPECT_LE(scaled.values[p], c);
      }
    }
  }
}

TEST(TfpTest, Errors) {
  const auto s = single_pixel(4, {1});
  EXPECT_THROW(tfp(s, 4, 2, 1.0), Error);
  EXPECT_THROW(tfp(s, 1, 0, 1.0), Error);
  EXPECT_THROW(tfp(s, 1, 2, 0.0), Error);
  EXPECT_THROW(tfi(s, 9, {1.0}), Error);
}

}  // namespace
}  // namespace spikekit
