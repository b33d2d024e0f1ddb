// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cidcassi/cube.hpp"

namespace cidcassi {

enum class DispersionAxis { horizontal, vertical };

struct SceneDims {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;
};

/// Matrix-free dual-camera CASSI operator.
///
/// The effective mask of band b is guidance(b) * mask. Band b is shifted by
/// shift_step * b pixels in the positive index direction along the
/// dispersion axis (band 0 is the unshifted reference), and all bands are
/// summed on the detector. The detector therefore extends the scene by
/// shift_step * (bands - 1) pixels along that axis.
///
/// Immutable after construction; safe to share between threads.
class SensingOperator {
 public:
  SensingOperator(CodedMask mask, GuidanceCube guidance, std::size_t shift_step,
                  DispersionAxis axis, SceneDims dims);

  const SceneDims& scene_dims() const noexcept { return dims_; }
  std::size_t measurement_height() const noexcept { return meas_height_; }
  std::size_t measurement_width() const noexcept { return meas_width_; }
  std::size_t measurement_size() const noexcept { return meas_height_ * meas_width_; }
  std::size_t scene_size() const noexcept { return dims_.height * dims_.width * dims_.bands; }
  std::size_t shift_step() const noexcept { return shift_step_; }
  DispersionAxis axis() const noexcept { return axis_; }

  const CodedMask& mask() const noexcept { return mask_; }
  const GuidanceCube& guidance() const noexcept { return guidance_; }

  /// Effective mask plane for band b, H x W row-major.
  std::span<const double> effective_mask(std::size_t band) const noexcept {
    const std::size_t n = dims_.height * dims_.width;
    return {effective_.data() + band * n, n};
  }

  /// Offset of band b's origin on the detector.
  std::size_t row_offset(std::size_t band) const noexcept {
    return axis_ == DispersionAxis::vertical ? shift_step_ * band : 0;
  }
  std::size_t col_offset(std::size_t band) const noexcept {
    return axis_ == DispersionAxis::horizontal ? shift_step_ * band : 0;
  }

 private:
  CodedMask mask_;
  GuidanceCube guidance_;
  std::size_t shift_step_;
  DispersionAxis axis_;
  SceneDims dims_;
  std::size_t meas_height_;
  std::size_t meas_width_;
  std::vector<double> effective_;
};

/// Validates dims and builds the operator; throws ShapeError on mismatch.
SensingOperator build_operator(const CodedMask& mask, const GuidanceCube& guidance,
                               std::size_t shift_step, DispersionAxis axis, SceneDims dims);

/// y = H c.
Measurement apply_forward(const SensingOperator& op, const SpectralCube& chroma);

/// c = H^T y.
SpectralCube apply_adjoint(const SensingOperator& op, const Measurement& y);

/// Diagonal of H H^T, one entry per detector pixel (row-major). H H^T is
/// exactly diagonal because every scene voxel lands on a single detector pixel.
std::vector<double> gram_diagonal(const SensingOperator& op);

inline constexpr std::size_t kDefaultDenseCap = 65536;

/// Dense M x N matrix of the operator, built by probing with basis cubes.
/// Column j is apply_forward of the j-th basis cube in band-major order.
/// Refuses (SizeLimitError) when either side exceeds max_side.
Eigen::MatrixXd densify(const SensingOperator& op, std::size_t max_side = kDefaultDenseCap);

/// Diagonal Gaussian noise: per-detector-pixel standard deviation plus the
/// scalar denoiser strength the solver hands to the prox step.
struct NoiseModel {
  Plane sigma_map;
  double omega = 0.0;

  /// Throws ConfigError on negative or non-finite entries.
  void validate() const;
};

/// y + n with n_i ~ N(0, sigma_i^2), drawn from Rng(seed).
Measurement add_noise(const Measurement& y, const NoiseModel& noise, std::uint64_t seed);

}  // namespace cidcassi
