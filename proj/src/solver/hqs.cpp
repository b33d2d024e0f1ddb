// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/simd/kernels.hpp"
#include "cidcassi/solver.hpp"

namespace cidcassi {
namespace {

double residual_norm(const Measurement& y, const SensingOperator& op, const SpectralCube& z) {
  Measurement r = apply_forward(op, z);
  auto rv = r.values();
  const auto yv = y.values();
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = yv[i] - rv[i];
  return std::sqrt(simd::active_kernels().dot(rv.data(), rv.data(), rv.size()));
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

void SolverConfig::validate() const {
  if (stages < 1) throw ConfigError("solver: stages must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("solver: mu must be > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("solver: tau must be >= 0");
  if (!(fixed_sigma >= 0.0)) throw ConfigError("solver: fixed_sigma must be >= 0");
  if (!(gram_floor > 0.0)) throw ConfigError("solver: gram_floor must be > 0");
  if (tv_iterations < 1) throw ConfigError("solver: tv_iterations must be >= 1");
  if (estimator_window == 0 || estimator_window % 2 == 0) {
    throw ConfigError("solver: estimator_window must be odd and >= 1");
  }
  if (!(estimator_floor > 0.0)) throw ConfigError("solver: estimator_floor must be > 0");
  if (!(divergence_factor > 0.0)) throw ConfigError("solver: divergence_factor must be > 0");
}

SpectralCube initial_estimate(const Measurement& y, const SensingOperator& op) {
  const std::vector<double> gram = gram_diagonal(op);
  const double peak = gram.empty() ? 0.0 : *std::max_element(gram.begin(), gram.end());
  SpectralCube z = apply_adjoint(op, y);
  if (!(peak > 0.0)) {
    std::fill(z.values().begin(), z.values().end(), 0.0);
    return z;
  }
  for (double& v : z.values()) v /= peak;
  return z;
}

SolveResult run_hqs(const Measurement& y, const SensingOperator& op, const SolverConfig& config,
                    const NoiseEstimator& estimator, const Denoiser& denoiser,
                    const std::optional<SpectralCube>& initial) {
  config.validate();
  if (y.height() != op.measurement_height() || y.width() != op.measurement_width()) {
    throw ShapeError("run_hqs: measurement dims do not match the operator");
  }
  SpectralCube z = initial ? *initial : initial_estimate(y, op);
  const auto& d = op.scene_dims();
  if (z.height() != d.height || z.width() != d.width || z.bands() != d.bands) {
    throw ShapeError("run_hqs: initial estimate is " + z.shape_string() +
                     ", operator scene differs");
  }

  const std::vector<double> gram = gram_diagonal(op);
  const double start_residual = residual_norm(y, op, z);
  const double limit = config.divergence_factor * start_residual;

  SolveResult result;
  if (config.record_trace) result.trace.stages.reserve(config.stages);
  for (std::size_t k = 0; k < config.stages; ++k) {
    const NoiseModel noise = estimator.estimate(z, y, op);
    const SpectralCube c =
        gradient_projection(z, y, op, gram, noise.sigma_map, config.mu, config.gram_floor);
    z = denoiser.apply(c, noise.omega * config.tau);

    const double res = residual_norm(y, op, z);
    if (!std::isfinite(res) || (start_residual > 0.0 && res > limit)) {
      std::ostringstream msg;
      msg << "run_hqs: diverged at stage " << k + 1 << ": residual " << res << " vs initial "
          << start_residual << " (limit factor " << config.divergence_factor << ")";
      throw DivergenceError(msg.str());
    }
    if (config.record_trace) {
      StageRecord rec;
      rec.residual_norm = res;
      rec.consistency_norm = residual_norm(y, op, c);
      rec.mean_sigma = mean_of(noise.sigma_map.values());
      rec.omega = noise.omega;
      result.trace.stages.push_back(rec);
    }
  }
  result.estimate = std::move(z);
  return result;
}

SolveResult run_hqs(const Measurement& y, const SensingOperator& op, const SolverConfig& config,
                    const std::optional<SpectralCube>& initial) {
  config.validate();
  std::unique_ptr<NoiseEstimator> estimator;
  if (config.noise_estimator == NoiseEstimatorKind::fixed) {
    estimator = std::make_unique<FixedNoiseEstimator>(config.fixed_sigma, config.mu);
  } else {
    estimator =
        std::make_unique<ResidualNoiseEstimator>(config.estimator_window, config.estimator_floor);
  }
  std::unique_ptr<Denoiser> denoiser;
  if (config.denoiser == DenoiserKind::tv) {
    denoiser = std::make_unique<TvDenoiser>(config.tv_iterations);
  } else {
    denoiser = std::make_unique<IdentityDenoiser>();
  }
  return run_hqs(y, op, config, *estimator, *denoiser, initial);
}

std::string_view denoiser_name(DenoiserKind kind) noexcept {
  return kind == DenoiserKind::tv ? "tv" : "identity";
}

std::string_view estimator_name(NoiseEstimatorKind kind) noexcept {
  return kind == NoiseEstimatorKind::fixed ? "fixed" : "residual";
}

}  // namespace cidcassi
