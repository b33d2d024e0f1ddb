// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "cidcassi/simd/kernels.hpp"

namespace cidcassi::simd {
namespace {

void multiply_accumulate(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
}

void multiply(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void divide_offset(double* dst, const double* num, const double* den, double offset,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = num[i] / (den[i] + offset);
}

void subtract(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void tv_dual_step(double* px, double* py, const double* gx, const double* gy, double step,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    const double denom = 1.0 + step * norm;
    px[i] = (px[i] + step * gx[i]) / denom;
    py[i] = (py[i] + step * gy[i]) / denom;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Backend::scalar, "scalar", multiply_accumulate, multiply,
                                 divide_offset,   subtract, tv_dual_step,        dot};
  return table;
}

}  // namespace cidcassi::simd
