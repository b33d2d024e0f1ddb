// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <span>
#include <vector>

#include "cidcassi/cube.hpp"

namespace cidcassi {

/// Returned by psnr() when the inputs are identical.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;
inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

/// 10 log10(range^2 / MSE) over flattened samples; +inf when MSE is 0.
double psnr(std::span<const double> ref, std::span<const double> rec, double data_range = 1.0);
double psnr(const Plane& ref, const Plane& rec, double data_range = 1.0);
double psnr(const SpectralCube& ref, const SpectralCube& rec, double data_range = 1.0);

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, evaluated at every position where the window fits inside the
/// image. Images smaller than the window raise ConfigError.
double ssim(const Plane& ref, const Plane& rec, double data_range = 1.0);

struct EvalReport {
  std::vector<double> band_psnr;
  std::vector<double> band_ssim;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  double data_range = 1.0;
};

/// Per-band PSNR/SSIM and their arithmetic means over bands. The mean PSNR
/// is +inf if any band is reconstructed exactly.
EvalReport evaluate_cube(const SpectralCube& ref, const SpectralCube& rec,
                         double data_range = 1.0);

}  // namespace cidcassi
