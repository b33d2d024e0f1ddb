// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cidcassi/cube.hpp"
#include "cidcassi/prox.hpp"
#include "cidcassi/sensing.hpp"

namespace cidcassi {

enum class DenoiserKind { identity, tv };
enum class NoiseEstimatorKind { fixed, residual };

struct SolverConfig {
  std::size_t stages = 30;
  /// Penalty of the c-subproblem. 1 reproduces the estimator-driven form
  /// in which the penalty is folded into the noise map.
  double mu = 1.0;
  /// Multiplier on the prox strength handed over by the noise estimator.
  double tau = 1.0;
  DenoiserKind denoiser = DenoiserKind::tv;
  NoiseEstimatorKind noise_estimator = NoiseEstimatorKind::residual;
  double fixed_sigma = 0.0;
  /// Floor on h_i + mu * sigma_i^2.
  double gram_floor = 1e-9;
  bool record_trace = true;

  std::size_t tv_iterations = kDefaultTvIterations;
  std::size_t estimator_window = 5;
  double estimator_floor = 1e-10;
  /// Abort once ||y - Hz|| exceeds this multiple of the initial residual.
  double divergence_factor = 1e3;

  void validate() const;
};

struct StageRecord {
  /// ||y - H z|| for the stage output z.
  double residual_norm = 0.0;
  /// ||y - H c|| right after the gradient projection.
  double consistency_norm = 0.0;
  double mean_sigma = 0.0;
  double omega = 0.0;
};

struct SolveTrace {
  std::vector<StageRecord> stages;
};

struct SolveResult {
  SpectralCube estimate;
  SolveTrace trace;
};

/// Closed-form c-step:
///   c = z + H^T r,  r_i = (y_i - [Hz]_i) / max(h_i + mu * sigma_i^2, gram_floor)
/// with h = gram_diagonal(op). sigma_map has the detector's dims.
SpectralCube gradient_projection(const SpectralCube& z, const Measurement& y,
                                 const SensingOperator& op, const Plane& sigma_map, double mu,
                                 double gram_floor = 1e-9);

/// Same step with the Gram diagonal supplied by the caller (the solver
/// computes it once per solve).
SpectralCube gradient_projection(const SpectralCube& z, const Measurement& y,
                                 const SensingOperator& op, std::span<const double> gram,
                                 const Plane& sigma_map, double mu, double gram_floor);

struct ClosedFormResult {
  /// (H^T S^-1 H + mu I)^-1 (H^T S^-1 y + mu z) by a dense solve.
  Eigen::VectorXd direct;
  /// The same vector through mu^-1 I - mu^-2 H^T (S + mu^-1 H H^T)^-1 H, with
  /// the inner inverse taken densely (no diagonal assumption).
  Eigen::VectorXd woodbury;
  double relative_difference = 0.0;
};

/// Dense oracle for the c-step. sigma_i^2 is floored at gram_floor since the
/// direct form needs an invertible S. Throws NumericalError when the two
/// routes disagree by more than agreement_tol (relative).
ClosedFormResult closed_form_direct(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& dense_h,
                                    const Eigen::VectorXd& sigma, double mu,
                                    double gram_floor = 1e-9, double agreement_tol = 1e-6);

/// (H^T S^-1 H + mu I)^-1 formed by a dense inverse.
Eigen::MatrixXd data_step_inverse_direct(const Eigen::MatrixXd& dense_h,
                                         const Eigen::VectorXd& sigma, double mu,
                                         double gram_floor = 1e-9);

/// mu^-1 I - mu^-2 H^T (S + mu^-1 H H^T)^-1 H, inner inverse taken densely.
Eigen::MatrixXd data_step_inverse_woodbury(const Eigen::MatrixXd& dense_h,
                                           const Eigen::VectorXd& sigma, double mu,
                                           double gram_floor = 1e-9);

/// Cube/measurement convenience overload; returns the direct solution.
SpectralCube closed_form_direct(const SpectralCube& z, const Measurement& y,
                                const Eigen::MatrixXd& dense_h, const Plane& sigma_map, double mu,
                                double gram_floor = 1e-9);

/// Produces the noise map and prox strength for a stage from the current
/// iterate and the measurement.
class NoiseEstimator {
 public:
  virtual ~NoiseEstimator() = default;
  virtual NoiseModel estimate(const SpectralCube& z, const Measurement& y,
                              const SensingOperator& op) const = 0;
};

/// sigma^2 = box-filtered (y - Hz)^2 over a window x window neighbourhood
/// (clipped at the borders), floored; omega = sqrt(mean sigma^2).
NoiseModel estimate_noise_residual(const SpectralCube& z, const Measurement& y,
                                   const SensingOperator& op, std::size_t window, double floor);

class ResidualNoiseEstimator final : public NoiseEstimator {
 public:
  ResidualNoiseEstimator(std::size_t window, double floor);
  NoiseModel estimate(const SpectralCube& z, const Measurement& y,
                      const SensingOperator& op) const override {
    return estimate_noise_residual(z, y, op, window_, floor_);
  }

 private:
  std::size_t window_;
  double floor_;
};

/// Constant sigma everywhere; omega = 1 / mu so the prox strength is tau / mu.
class FixedNoiseEstimator final : public NoiseEstimator {
 public:
  FixedNoiseEstimator(double sigma, double mu);
  NoiseModel estimate(const SpectralCube& z, const Measurement& y,
                      const SensingOperator& op) const override;

 private:
  double sigma_;
  double omega_;
};

/// Default start: H^T y / max(h), or zeros if the operator senses nothing.
SpectralCube initial_estimate(const Measurement& y, const SensingOperator& op);

/// Half-quadratic splitting. Each stage:
///   (sigma, omega) = estimator(z, y)
///   c = gradient_projection(z, y, sigma)
///   z = denoiser(c, omega * tau)
/// Throws DivergenceError if the residual runs away.
SolveResult run_hqs(const Measurement& y, const SensingOperator& op, const SolverConfig& config,
                    const std::optional<SpectralCube>& initial = std::nullopt);

/// Same loop with caller-supplied plug-ins; config selects neither.
SolveResult run_hqs(const Measurement& y, const SensingOperator& op, const SolverConfig& config,
                    const NoiseEstimator& estimator, const Denoiser& denoiser,
                    const std::optional<SpectralCube>& initial = std::nullopt);

std::string_view denoiser_name(DenoiserKind kind) noexcept;
std::string_view estimator_name(NoiseEstimatorKind kind) noexcept;

}  // namespace cidcassi
