// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

#include "cidcassi/cube.hpp"

namespace cidcassi {

inline constexpr std::size_t kDefaultTvIterations = 20;
inline constexpr double kDefaultTvStep = 0.25;

/// prox_{weight * R}: deterministic, shape-preserving, identity at weight 0.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual SpectralCube apply(const SpectralCube& cube, double weight) const = 0;
  virtual std::string_view name() const noexcept = 0;
};

/// Approximate minimiser of 0.5*||z - c||^2 + weight * TV(z), where TV is
/// isotropic total variation over the two spatial axes, applied to each band
/// independently. Chambolle's dual projection with a fixed step and Neumann
/// boundaries (forward differences, zero flux across the last row/column).
SpectralCube tv_denoise(const SpectralCube& cube, double weight,
                        std::size_t inner_iters = kDefaultTvIterations,
                        double step = kDefaultTvStep);

SpectralCube identity_denoise(const SpectralCube& cube, double weight = 0.0);

/// Isotropic TV summed over bands, with the same discretisation as tv_denoise.
double total_variation(const SpectralCube& cube);

/// 0.5*||z - reference||^2 + weight * TV(z).
double tv_objective(const SpectralCube& z, const SpectralCube& reference, double weight);

class TvDenoiser final : public Denoiser {
 public:
  explicit TvDenoiser(std::size_t inner_iters = kDefaultTvIterations,
                      double step = kDefaultTvStep);
  SpectralCube apply(const SpectralCube& cube, double weight) const override {
    return tv_denoise(cube, weight, inner_iters_, step_);
  }
  std::string_view name() const noexcept override { return "tv"; }

 private:
  std::size_t inner_iters_;
  double step_;
};

class IdentityDenoiser final : public Denoiser {
 public:
  SpectralCube apply(const SpectralCube& cube, double weight) const override {
    return identity_denoise(cube, weight);
  }
  std::string_view name() const noexcept override { return "identity"; }
};

}  // namespace cidcassi
