#pragma once

// Full-reference image quality: MSE, PSNR and SSIM.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "spikekit/error.hpp"
#include "spikekit/filter.hpp"
#include "spikekit/image.hpp"
#include "spikekit/synthesis.hpp"

namespace spikekit {

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

inline double mse(const Image& a, const Image& b) {
  detail::require_same_shape(a, b, "mse");
  const auto va = a.values();
  const auto vb = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = static_cast<double>(va[i]) - static_cast<double>(vb[i]);
    sum += d * d;
  }
  return va.empty() ? 0.0 : sum / static_cast<double>(va.size());
}

inline double psnr_from_mse(double mse_value, double max_i) {
  detail::require(max_i > 0.0, ErrorCode::kInvalidArgument, "max_i must be positive");
  if (mse_value == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(max_i * max_i / mse_value);
}

// +infinity for identical images.
inline double psnr(const Image& a, const Image& b, double max_i = 1.0) { return psnr_from_mse(mse(a, b), max_i); }

struct SsimOptions {
  double k1 = 0.01;
  double k2 = 0.03;
  double sigma = 1.5;
  std::size_t radius = 5;  // window side is 2 * radius + 1
};

// Mean of local SSIM over every window fully inside the image.
inline double ssim(const Image& a, const Image& b, double max_i = 1.0, const SsimOptions& opt = {}) {
  detail::require_same_shape(a, b, "ssim");
  detail::require(a.channels() == 1, ErrorCode::kInvalidArgument, "ssim expects single-channel images");
  detail::require(max_i > 0.0, ErrorCode::kInvalidArgument, "max_i must be positive");
  const std::size_t side = 2 * opt.radius + 1;
  detail::require(a.width() >= side && a.height() >= side, ErrorCode::kInvalidArgument,
                  "ssim needs images of at least " + std::to_string(side) + "x" + std::to_string(side));

  const std::size_t n = a.pixels();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a.plane(0)[i];
    y[i] = b.plane(0)[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto taps = gaussian_taps(opt.sigma, opt.radius);
  const auto w = a.width();
  const auto h = a.height();
  const auto mu_x = filter_valid(x, w, h, taps);
  const auto mu_y = filter_valid(y, w, h, taps);
  const auto e_xx = filter_valid(xx, w, h, taps);
  const auto e_yy = filter_valid(yy, w, h, taps);
  const auto e_xy = filter_valid(xy, w, h, taps);

  const double c1 = (opt.k1 * max_i) * (opt.k1 * max_i);
  const double c2 = (opt.k2 * max_i) * (opt.k2 * max_i);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
    const double den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_x.size());
}

struct MetricReport {
  double mse = 0.0;
  double psnr_db = kPsnrInfinity;
  double ssim = 1.0;
};

// SSIM of RGB pairs is taken on their BT.601 luma; MSE and PSNR use every channel.
inline MetricReport evaluate(const Image& a, const Image& b, double max_i = 1.0) {
  MetricReport r;
  r.mse = mse(a, b);
  r.psnr_db = psnr_from_mse(r.mse, max_i);
  r.ssim = a.channels() == 3 ? ssim(grayscale(a), grayscale(b), max_i) : ssim(a, b, max_i);
  return r;
}

}  // namespace spikekit
