// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/sensing.hpp"
#include "cidcassi/simd/kernels.hpp"

namespace cidcassi {
namespace {

void check_scene(const SpectralCube& cube, const SensingOperator& op, const char* what) {
  const auto& d = op.scene_dims();
  if (cube.height() != d.height || cube.width() != d.width || cube.bands() != d.bands) {
    std::ostringstream msg;
    msg << what << ": cube is " << cube.shape_string() << " but operator scene is " << d.height
        << "x" << d.width << "x" << d.bands;
    throw ShapeError(msg.str());
  }
}

}  // namespace

SensingOperator::SensingOperator(CodedMask mask, GuidanceCube guidance, std::size_t shift_step,
                                 DispersionAxis axis, SceneDims dims)
    : mask_(std::move(mask)),
      guidance_(std::move(guidance)),
      shift_step_(shift_step),
      axis_(axis),
      dims_(dims) {
  if (dims_.height == 0 || dims_.width == 0 || dims_.bands == 0) {
    throw ShapeError("sensing operator: scene dims must be positive");
  }
  if (mask_.height() != dims_.height || mask_.width() != dims_.width) {
    std::ostringstream msg;
    msg << "sensing operator: mask is " << mask_.height() << "x" << mask_.width()
        << " but scene is " << dims_.height << "x" << dims_.width;
    throw ShapeError(msg.str());
  }
  if (guidance_.height() != dims_.height || guidance_.width() != dims_.width ||
      guidance_.bands() != dims_.bands) {
    std::ostringstream msg;
    msg << "sensing operator: guidance is " << guidance_.height() << "x" << guidance_.width()
        << "x" << guidance_.bands() << " but scene is " << dims_.height << "x" << dims_.width
        << "x" << dims_.bands;
    throw ShapeError(msg.str());
  }
  mask_.validate();

  const std::size_t extent = shift_step_ * (dims_.bands - 1);
  meas_height_ = dims_.height + (axis_ == DispersionAxis::vertical ? extent : 0);
  meas_width_ = dims_.width + (axis_ == DispersionAxis::horizontal ? extent : 0);

  const auto& k = simd::active_kernels();
  const std::size_t n = dims_.height * dims_.width;
  effective_.resize(n * dims_.bands);
  for (std::size_t b = 0; b < dims_.bands; ++b) {
    k.multiply(effective_.data() + b * n, guidance_.plane(b).data(), mask_.values().data(), n);
  }
}

SensingOperator build_operator(const CodedMask& mask, const GuidanceCube& guidance,
                               std::size_t shift_step, DispersionAxis axis, SceneDims dims) {
  return SensingOperator(mask, guidance, shift_step, axis, dims);
}

Measurement apply_forward(const SensingOperator& op, const SpectralCube& chroma) {
  check_scene(chroma, op, "apply_forward");
  const auto& d = op.scene_dims();
  const auto& k = simd::active_kernels();
  Measurement y(op.measurement_height(), op.measurement_width(), 0.0);
  double* out = y.values().data();
  const std::size_t mw = op.measurement_width();
  // Bands outermost: every detector pixel accumulates its bands in index order.
  for (std::size_t b = 0; b < d.bands; ++b) {
    const double* m = op.effective_mask(b).data();
    const std::size_t r0 = op.row_offset(b);
    const std::size_t c0 = op.col_offset(b);
    for (std::size_t r = 0; r < d.height; ++r) {
      k.multiply_accumulate(out + (r + r0) * mw + c0, m + r * d.width, chroma.row(b, r).data(),
                            d.width);
    }
  }
  return y;
}

SpectralCube apply_adjoint(const SensingOperator& op, const Measurement& y) {
  if (y.height() != op.measurement_height() || y.width() != op.measurement_width()) {
    std::ostringstream msg;
    msg << "apply_adjoint: measurement is " << y.height() << "x" << y.width()
        << " but operator expects " << op.measurement_height() << "x" << op.measurement_width();
    throw ShapeError(msg.str());
  }
  const auto& d = op.scene_dims();
  const auto& k = simd::active_kernels();
  SpectralCube out(d.height, d.width, d.bands);
  const double* in = y.values().data();
  const std::size_t mw = op.measurement_width();
  for (std::size_t b = 0; b < d.bands; ++b) {
    const double* m = op.effective_mask(b).data();
    const std::size_t r0 = op.row_offset(b);
    const std::size_t c0 = op.col_offset(b);
    for (std::size_t r = 0; r < d.height; ++r) {
      k.multiply(out.row(b, r).data(), m + r * d.width, in + (r + r0) * mw + c0, d.width);
    }
  }
  return out;
}

std::vector<double> gram_diagonal(const SensingOperator& op) {
  const auto& d = op.scene_dims();
  const auto& k = simd::active_kernels();
  std::vector<double> h(op.measurement_size(), 0.0);
  const std::size_t mw = op.measurement_width();
  for (std::size_t b = 0; b < d.bands; ++b) {
    const double* m = op.effective_mask(b).data();
    const std::size_t r0 = op.row_offset(b);
    const std::size_t c0 = op.col_offset(b);
    for (std::size_t r = 0; r < d.height; ++r) {
      const double* mr = m + r * d.width;
      k.multiply_accumulate(h.data() + (r + r0) * mw + c0, mr, mr, d.width);
    }
  }
  return h;
}

Eigen::MatrixXd densify(const SensingOperator& op, std::size_t max_side) {
  const std::size_t rows = op.measurement_size();
  const std::size_t cols = op.scene_size();
  if (rows > max_side || cols > max_side) {
    std::ostringstream msg;
    msg << "densify: operator is " << rows << "x" << cols << ", above the cap of " << max_side
        << " per side";
    throw SizeLimitError(msg.str());
  }
  const auto& d = op.scene_dims();
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                                static_cast<Eigen::Index>(cols));
  SpectralCube basis(d.height, d.width, d.bands, 0.0);
  auto cells = basis.values();
  for (std::size_t j = 0; j < cols; ++j) {
    cells[j] = 1.0;
    const Measurement column = apply_forward(op, basis);
    cells[j] = 0.0;
    const auto v = column.values();
    for (std::size_t i = 0; i < rows; ++i) {
      if (v[i] != 0.0) dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i];
    }
  }
  return dense;
}

}  // namespace cidcassi
