#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spikekit/spike_model.hpp"
#include "test_support.hpp"

namespace spikekit {
namespace {

using testing::dyadic_sequence;
using testing::spike_counts;

IntensitySequence constant_pixel(double value, std::size_t t) {
  return IntensitySequence::repeat(IntensityFrame::uniform(1, 1, value), t);
}

// Scalar reference: literal accumulate / compare / subtract, one pixel.
struct ScalarOracle {
  double v_th;
  double residual = 0.0;
  bool step(double intensity) {
    double charge = residual + intensity;
    const bool spike = charge >= v_th;
    while (charge >= v_th) charge -= v_th;
    residual = charge;
    return spike;
  }
};

TEST(SimulateTest, AllZeroInput) {
  const auto r = simulate(IntensitySequence::repeat(IntensityFrame::uniform(5, 3, 0.0), 7), {1.0});
  EXPECT_EQ(r.stream.count_ones(), 0u);
  EXPECT_EQ(r.stream.t_count(), 7u);
  for (double v : r.state.residuals()) EXPECT_EQ(v, 0.0);
}

TEST(SimulateTest, ConstantPointThreeHandUnrolled) {
  const auto r = simulate(constant_pixel(0.3, 8), {1.0});
  for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(r.stream.get(t, 0), t == 3 || t == 6) << "step " << t + 1;
  EXPECT_NEAR(r.state.residuals()[0], 0.4, 1e-12);
}

TEST(SimulateTest, ExactThresholdFires) {
  const auto r = simulate(constant_pixel(1.0, 3), {1.0});
  EXPECT_EQ(r.stream.count_ones(), 3u);
  EXPECT_EQ(r.state.residuals()[0], 0.0);
}

TEST(SimulateTest, AboveDoubleThresholdEmitsOneSpikeAndKeepsRemainder) {
  const auto r = simulate(constant_pixel(2.5, 1), {1.0});
  EXPECT_EQ(r.stream.count_ones(), 1u);
  EXPECT_DOUBLE_EQ(r.state.residuals()[0], 0.5);
}

TEST(SimulateTest, ConservationMatchesFloorOfSum) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const double v_th = std::ldexp(1.0, static_cast<int>(gen() % 4) - 1);
    const auto seq = dyadic_sequence(gen, 4, 3, 1 + gen() % 64, v_th);
    const auto r = simulate(seq, {v_th});
    const auto counts = spike_counts(r.stream);
    for (std::size_t p = 0; p < counts.size(); ++p) {
      double sum = 0.0;
      for (const auto& f : seq.frames()) sum += f[p];
      EXPECT_EQ(counts[p], static_cast<std::size_t>(std::floor(sum / v_th)));
    }
  }
}

TEST(SimulateTest, MatchesScalarOracleOnArbitraryInputs) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 2.5);
  std::vector<IntensityFrame> frames;
  for (int t = 0; t < 40; ++t) {
    std::vector<double> v(6);
    for (double& x : v) x = u(gen);
    frames.emplace_back(3, 2, v);
  }
  const IntensitySequence seq(frames);
  const auto r = simulate(seq, {1.0});
  for (std::size_t p = 0; p < 6; ++p) {
    ScalarOracle oracle{1.0};
    for (std::size_t t = 0; t < seq.t_count(); ++t) EXPECT_EQ(r.stream.get(t, p), oracle.step(seq[t][p]));
    EXPECT_NEAR(r.state.residuals()[p], oracle.residual, 1e-12);
  }
}

TEST(SimulateTest, ResidualsStayInRange) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (double v_th : {0.5, 1.0, 3.0}) {
    std::vector<IntensityFrame> frames;
    for (int t = 0; t < 30; ++t) {
      std::vector<double> v(16);
      for (double& x : v) x = u(gen);
      frames.emplace_back(4, 4, v);
    }
    AccumulatorState state = AccumulatorState::zeros({4, 4});
    for (const auto& f : frames) {
      state = simulate_step(state, f, {v_th}).state;
      for (double r : state.residuals()) {
        ASSERT_GE(r, 0.0);
        ASSERT_LT(r, v_th);
      }
    }
  }
}

TEST(SimulateTest, MonotoneInIntensity) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> bump(0.0, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lo = dyadic_sequence(gen, 3, 3, 32, 1.0);
    std::vector<IntensityFrame> hi_frames;
    for (const auto& f : lo.frames()) {
      std::vector<double> v(f.values().begin(), f.values().end());
      for (double& x : v) x = std::min(x + bump(gen), std::nextafter(1.0, 0.0));
      hi_frames.emplace_back(3, 3, v);
    }
    const auto c_lo = spike_counts(simulate(lo, {1.0}).stream);
    const auto c_hi = spike_counts(simulate(IntensitySequence(hi_frames), {1.0}).stream);
    for (std::size_t p = 0; p < c_lo.size(); ++p) EXPECT_GE(c_hi[p], c_lo[p]);
  }
}

TEST(SimulateTest, DeterministicAndHonorsInitialState) {
  std::mt19937_64 gen(5);
  const auto seq = dyadic_sequence(gen, 5, 5, 10, 1.0);
  std::vector<double> init(25);
  for (double& r : init) r = std::ldexp(static_cast<double>(gen() % 1024), -10);
  const AccumulatorState state(5, 5, init);
  const auto a = simulate(seq, {1.0}, state);
  const auto b = simulate(seq, {1.0}, state);
  EXPECT_EQ(a.stream, b.stream);
  EXPECT_EQ(a.state, b.state);
  EXPECT_NE(a.stream, simulate(seq, {1.0}).stream);
}

TEST(SimulateTest, Errors) {
  const auto seq = IntensitySequence::repeat(IntensityFrame::uniform(2, 2, 0.1), 2);
  EXPECT_THROW(simulate(seq, {1.0}, AccumulatorState::zeros({3, 2})), Error);
  EXPECT_THROW(simulate(seq, {1.0}, AccumulatorState(2, 2, {0, 0, 0, 1.0})), Error);
  EXPECT_THROW(simulate(seq, {0.0}), Error);
  EXPECT_THROW(IntensityFrame(1, 1, {-0.1}), Error);
  EXPECT_THROW(IntensityFrame(1, 1, {std::nan("")}), Error);
  EXPECT_THROW(IntensityFrame(2, 1, {0.1}), Error);
  EXPECT_THROW(IntensitySequence(std::vector<IntensityFrame>{}), Error);
  EXPECT_THROW(IntensitySequence({IntensityFrame::uniform(2, 2, 0), IntensityFrame::uniform(2, 3, 0)}), Error);
  try {
    simulate(seq, {1.0}, AccumulatorState::zeros({3, 2}));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(SimulateStepTest, BelowThreshold) {
  const auto r = simulate_step(AccumulatorState(1, 1, {0.9}), IntensityFrame::uniform(1, 1, 0.05), {1.0});
  EXPECT_FALSE(r.stream.get(0, 0));
  EXPECT_NEAR(r.state.residuals()[0], 0.95, 1e-15);
}

TEST(SimulateStepTest, ExactThresholdFires) {
  const auto r = simulate_step(AccumulatorState(1, 1, {0.9}), IntensityFrame::uniform(1, 1, 0.1), {1.0});
  EXPECT_TRUE(r.stream.get(0, 0));
  EXPECT_EQ(r.state.residuals()[0], 0.0);
}

TEST(SimulateStepTest, FoldEqualsBatch) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  std::vector<IntensityFrame> frames;
  for (int t = 0; t < 16; ++t) {
    std::vector<double> v(7 * 5);
    for (double& x : v) x = u(gen);
    frames.emplace_back(7, 5, v);
  }
  const IntensitySequence seq(frames);
  const auto batch = simulate(seq, {1.0});
  AccumulatorState state = AccumulatorState::zeros(seq.extent());
  SpikeStream folded;
  for (const auto& f : seq.frames()) {
    auto r = simulate_step(state, f, {1.0});
    folded.append(r.stream);
    state = std::move(r.state);
  }
  EXPECT_EQ(folded, batch.stream);
  EXPECT_EQ(state, batch.state);
}

TEST(SimulateStepTest, DimensionMismatch) {
  EXPECT_THROW(simulate_step(AccumulatorState::zeros({2, 2}), IntensityFrame::uniform(2, 3, 0.1), {1.0}), Error);
}

TEST(CoverageTest, HandCounted) {
  EXPECT_EQ(coverage(SpikeStream(3, 3, 4)), 0.0);
  EXPECT_EQ(coverage(SpikeStream::from_dense(2, 2, 1, std::vector<std::uint8_t>{1, 0, 0, 1})), 0.5);
  const std::vector<std::uint8_t> ones(3 * 3 * 2, 1);
  EXPECT_EQ(coverage(SpikeStream::from_dense(3, 3, 2, ones)), 1.0);
}

TEST(CalibrateCoverageTest, UniformImageHitsTargetExactly) {
  const auto cal = calibrate_coverage(IntensityFrame::uniform(4, 4, 0.5), 1000, 0.1, {1.0});
  EXPECT_DOUBLE_EQ(cal.scale, 0.2);
  EXPECT_FALSE(cal.clamped);
  EXPECT_EQ(cal.sequence.t_count(), 1000u);
  for (double v : cal.sequence[0].values()) EXPECT_DOUBLE_EQ(v, 0.1);
  const auto r = simulate(cal.sequence, {1.0});
  EXPECT_EQ(coverage(r.stream), 0.1);
  for (std::size_t t = 0; t < 30; ++t) EXPECT_EQ(r.stream.get(t, 0), t % 10 == 9);
}

TEST(CalibrateCoverageTest, HalfCoverage) {
  const auto cal = calibrate_coverage(IntensityFrame::uniform(3, 3, 1.0), 64, 0.5, {1.0});
  for (double v : cal.sequence[0].values()) EXPECT_DOUBLE_EQ(v, 0.5);
  EXPECT_EQ(coverage(simulate(cal.sequence, {1.0}).stream), 0.5);
}

TEST(CalibrateCoverageTest, NaturalImageWithinSpikeCountBound) {
  const auto img = IntensityFrame::from_image(testing::natural_image(128, 128));
  const auto cal = calibrate_coverage(img, 64, 0.1, {1.0});
  EXPECT_NEAR(coverage(simulate(cal.sequence, {1.0}).stream), 0.1, 0.01);
}

TEST(CalibrateCoverageTest, ClampsBrightOutliers) {
  // mean 0.01, target 0.05 -> scale 5; both bright pixels would exceed v_th.
  std::vector<double> v(100, 0.0);
  v[0] = 0.55;
  v[1] = 0.45;
  const auto cal = calibrate_coverage(IntensityFrame(10, 10, v), 4, 0.05, {1.0});
  EXPECT_TRUE(cal.clamped);
  EXPECT_LT(cal.sequence[0][0], 1.0);
  EXPECT_EQ(cal.sequence[0][0], std::nextafter(1.0, 0.0));
  EXPECT_FALSE(calibrate_coverage(IntensityFrame(10, 10, v), 4, 0.01, {1.0}).clamped);
}

TEST(CalibrateCoverageTest, Errors) {
  EXPECT_THROW(calibrate_coverage(IntensityFrame::uniform(2, 2, 0.0), 8, 0.1, {1.0}), Error);
  EXPECT_THROW(calibrate_coverage(IntensityFrame::uniform(2, 2, 0.5), 8, 0.0, {1.0}), Error);
  EXPECT_THROW(calibrate_coverage(IntensityFrame::uniform(2, 2, 0.5), 8, 1.0, {1.0}), Error);
}

}  // namespace
}  // namespace spikekit
