// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <vector>

#include "cidcassi/error.hpp"
#include "cidcassi/solver.hpp"

namespace cidcassi {

NoiseModel estimate_noise_residual(const SpectralCube& z, const Measurement& y,
                                   const SensingOperator& op, std::size_t window, double floor) {
  if (window == 0 || window % 2 == 0) {
    throw ConfigError("estimate_noise_residual: window must be odd and >= 1");
  }
  if (!(floor > 0.0)) throw ConfigError("estimate_noise_residual: floor must be > 0");
  if (y.height() != op.measurement_height() || y.width() != op.measurement_width()) {
    throw ShapeError("estimate_noise_residual: measurement dims do not match the operator");
  }

  const Measurement hz = apply_forward(op, z);
  const std::size_t h = y.height();
  const std::size_t w = y.width();

  // Summed-area table of squared residuals, (h+1) x (w+1).
  std::vector<double> sat((h + 1) * (w + 1), 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    double run = 0.0;
    for (std::size_t c = 0; c < w; ++c) {
      const double d = y.at(r, c) - hz.at(r, c);
      run += d * d;
      sat[(r + 1) * (w + 1) + c + 1] = sat[r * (w + 1) + c + 1] + run;
    }
  }

  const std::size_t half = window / 2;
  NoiseModel model{Plane(h, w), 0.0};
  double var_sum = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t r0 = r >= half ? r - half : 0;
    const std::size_t r1 = std::min(h, r + half + 1);
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t c0 = c >= half ? c - half : 0;
      const std::size_t c1 = std::min(w, c + half + 1);
      const double box = sat[r1 * (w + 1) + c1] - sat[r0 * (w + 1) + c1] -
                         sat[r1 * (w + 1) + c0] + sat[r0 * (w + 1) + c0];
      const double count = static_cast<double>((r1 - r0) * (c1 - c0));
      const double var = std::max(box / count, floor);
      model.sigma_map.at(r, c) = std::sqrt(var);
      var_sum += var;
    }
  }
  model.omega = std::sqrt(var_sum / static_cast<double>(h * w));
  return model;
}

ResidualNoiseEstimator::ResidualNoiseEstimator(std::size_t window, double floor)
    : window_(window), floor_(floor) {
  if (window_ == 0 || window_ % 2 == 0) {
    throw ConfigError("ResidualNoiseEstimator: window must be odd and >= 1");
  }
  if (!(floor_ > 0.0)) throw ConfigError("ResidualNoiseEstimator: floor must be > 0");
}

FixedNoiseEstimator::FixedNoiseEstimator(double sigma, double mu) : sigma_(sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("FixedNoiseEstimator: sigma must be finite and >= 0");
  }
  if (!(mu > 0.0)) throw ConfigError("FixedNoiseEstimator: mu must be > 0");
  omega_ = 1.0 / mu;
}

NoiseModel FixedNoiseEstimator::estimate(const SpectralCube& /*z*/, const Measurement& y,
                                         const SensingOperator& /*op*/) const {
  return NoiseModel{Plane(y.height(), y.width(), sigma_), omega_};
}

}  // namespace cidcassi
