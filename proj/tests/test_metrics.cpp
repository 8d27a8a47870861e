#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "spikekit/metrics.hpp"
#include "test_support.hpp"

namespace spikekit {
namespace {

using testing::random_image;

TEST(MseTest, KnownValues) {
  std::mt19937_64 gen(1);
  const Image a = random_image(gen, 7, 5, 3);
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(Image(1, 1, 1, 0.0f), Image(1, 1, 1, 255.0f)), 255.0 * 255.0);
  EXPECT_THROW(mse(a, Image(7, 5, 1)), Error);
}

TEST(MseTest, MatchesNaiveOracleAndIsSymmetric) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Image a = random_image(gen, 9, 8, 3), b = random_image(gen, 9, 8, 3);
    EXPECT_NEAR(mse(a, b), oracle::mse(a, b), 1e-12);
    EXPECT_EQ(mse(a, b), mse(b, a));
  }
}

TEST(PsnrTest, KnownValues) {
  const Image a(4, 4, 1, 0.25f);
  EXPECT_EQ(psnr(a, a), kPsnrInfinity);
  EXPECT_DOUBLE_EQ(psnr(Image(1, 1, 1, 0.0f), Image(1, 1, 1, 1.0f), 1.0), 0.0);
  // 8-bit pair whose MSE is exactly 1.
  Image b(4, 4, 1, 100.0f), c(4, 4, 1, 101.0f);
  EXPECT_NEAR(psnr(b, c, 255.0), 48.1308, 1e-3);
  EXPECT_NEAR(psnr(b, c, 255.0), 20 * std::log10(255.0), 1e-12);
  EXPECT_THROW(psnr(a, a, 0.0), Error);
}

TEST(PsnrTest, StrictlyDecreasingInMse) {
  double prev = kPsnrInfinity;
  for (double m = 1e-6; m < 10; m *= 1.7) {
    const double v = psnr_from_mse(m, 1.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(SsimTest, IdenticalIsExactlyOne) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Image a = random_image(gen, 20 + trial, 15, 1);
    EXPECT_EQ(ssim(a, a), 1.0);
  }
  EXPECT_EQ(ssim(Image(11, 11, 1, 0.3f), Image(11, 11, 1, 0.3f)), 1.0);
}

TEST(SsimTest, OppositeConstantsNearZero) {
  for (double max_i : {1.0, 255.0}) {
    const double v = ssim(Image(12, 12, 1, 0.0f), Image(12, 12, 1, static_cast<float>(max_i)), max_i);
    EXPECT_LT(v, 0.01);
    EXPECT_GE(v, 0.0);
  }
}

TEST(SsimTest, MatchesBruteForceOracle) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Image a = random_image(gen, 32, 32, 1);
    Image b = a;
    std::normal_distribution<float> n(0.0f, 0.1f);
    for (float& v : b.values()) v = std::clamp(v + n(gen), 0.0f, 1.0f);
    EXPECT_NEAR(ssim(a, b), oracle::ssim(a, b, 1.0), 1e-6);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
  }
}

TEST(SsimTest, AlternateWindowMatchesOracle) {
  std::mt19937_64 gen(5);
  const Image a = random_image(gen, 24, 20, 1), b = random_image(gen, 24, 20, 1);
  const SsimOptions opt{0.01, 0.03, 2.0, 3};
  EXPECT_NEAR(ssim(a, b, 1.0, opt), oracle::ssim(a, b, 1.0, 2.0, 3), 1e-6);
}

TEST(SsimTest, RangeOnAdversarialInputs) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Image a = random_image(gen, 16, 16, 1);
    Image inv = a;
    for (float& v : inv.values()) v = 1.0f - v;
    for (const Image* b : std::initializer_list<const Image*>{&inv, &a}) {
      const double v = ssim(a, *b);
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(SsimTest, Errors) {
  EXPECT_THROW(ssim(Image(10, 20, 1), Image(10, 20, 1)), Error);
  EXPECT_THROW(ssim(Image(12, 12, 3), Image(12, 12, 3)), Error);
  EXPECT_THROW(ssim(Image(12, 12, 1), Image(13, 12, 1)), Error);
}

TEST(EvaluateTest, RgbUsesLumaForSsim) {
  std::mt19937_64 gen(7);
  const Image a = random_image(gen, 16, 16, 3), b = random_image(gen, 16, 16, 3);
  const auto r = evaluate(a, b);
  EXPECT_EQ(r.mse, mse(a, b));
  EXPECT_EQ(r.psnr_db, psnr(a, b));
  EXPECT_EQ(r.ssim, ssim(grayscale(a), grayscale(b)));
  const auto same = evaluate(a, a);
  EXPECT_EQ(same.mse, 0.0);
  EXPECT_EQ(same.psnr_db, kPsnrInfinity);
}

}  // namespace
}  // namespace spikekit
