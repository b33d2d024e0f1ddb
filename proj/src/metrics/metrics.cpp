// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/metrics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "cidcassi/error.hpp"

namespace cidcassi {
namespace {

void check_range(double data_range) {
  if (!(data_range > 0.0) || !std::isfinite(data_range)) {
    throw ConfigError("metrics: data_range must be finite and > 0");
  }
}

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> taps{};
  const double centre = static_cast<double>(kSsimWindow / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double x = static_cast<double>(i) - centre;
    taps[i] = std::exp(-(x * x) / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable 'valid' Gaussian filtering: output is (h-10) x (w-10).
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w,
                                 const std::array<double, kSsimWindow>& taps) {
  const std::size_t oh = h - kSsimWindow + 1;
  const std::size_t ow = w - kSsimWindow + 1;
  std::vector<double> tmp(h * ow);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < kSsimWindow; ++t) acc += taps[t] * img[r * w + c + t];
      tmp[r * ow + c] = acc;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < kSsimWindow; ++t) acc += taps[t] * tmp[(r + t) * ow + c];
      out[r * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(std::span<const double> ref, std::span<const double> rec, double data_range) {
  check_range(data_range);
  if (ref.size() != rec.size()) throw ShapeError("psnr: inputs differ in size");
  if (ref.empty()) throw ShapeError("psnr: empty input");
  double sse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - rec[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(ref.size());
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(data_range * data_range / mse);
}

double psnr(const Plane& ref, const Plane& rec, double data_range) {
  if (!ref.same_shape(rec)) throw ShapeError("psnr: plane dims differ");
  return psnr(ref.values(), rec.values(), data_range);
}

double psnr(const SpectralCube& ref, const SpectralCube& rec, double data_range) {
  if (!ref.same_shape(rec)) {
    throw ShapeError("psnr: cube " + ref.shape_string() + " vs " + rec.shape_string());
  }
  return psnr(ref.values(), rec.values(), data_range);
}

double ssim(const Plane& ref, const Plane& rec, double data_range) {
  check_range(data_range);
  if (!ref.same_shape(rec)) throw ShapeError("ssim: plane dims differ");
  const std::size_t h = ref.height();
  const std::size_t w = ref.width();
  if (h < kSsimWindow || w < kSsimWindow) {
    std::ostringstream msg;
    msg << "ssim: image " << h << "x" << w << " is smaller than the " << kSsimWindow << "x"
        << kSsimWindow << " window";
    throw ConfigError(msg.str());
  }

  const auto taps = gaussian_taps();
  const std::size_t n = h * w;
  std::vector<double> x(ref.values().begin(), ref.values().end());
  std::vector<double> y(rec.values().begin(), rec.values().end());
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, h, w, taps);
  const auto my = filter_valid(y, h, w, taps);
  const auto sxx = filter_valid(xx, h, w, taps);
  const auto syy = filter_valid(yy, h, w, taps);
  const auto sxy = filter_valid(xy, h, w, taps);

  const double c1 = (kSsimK1 * data_range) * (kSsimK1 * data_range);
  const double c2 = (kSsimK2 * data_range) * (kSsimK2 * data_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
    const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
    total += num / den;
  }
  return total / static_cast<double>(mx.size());
}

EvalReport evaluate_cube(const SpectralCube& ref, const SpectralCube& rec, double data_range) {
  if (!ref.same_shape(rec)) {
    throw ShapeError("evaluate_cube: " + ref.shape_string() + " vs " + rec.shape_string());
  }
  EvalReport report;
  report.data_range = data_range;
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  for (std::size_t b = 0; b < ref.bands(); ++b) {
    const Plane a = ref.band_plane(b);
    const Plane c = rec.band_plane(b);
    report.band_psnr.push_back(psnr(a, c, data_range));
    report.band_ssim.push_back(ssim(a, c, data_range));
    psnr_sum += report.band_psnr.back();
    ssim_sum += report.band_ssim.back();
  }
  const double nb = static_cast<double>(ref.bands());
  report.mean_psnr = psnr_sum / nb;
  report.mean_ssim = ssim_sum / nb;
  return report;
}

}  // namespace cidcassi
