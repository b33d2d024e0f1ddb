// SPDX-License-Identifier: Apache-2.0
//
// Compiled with -mavx2 -mfma. Nothing here may run unless the dispatcher
// has confirmed CPU support.

#include <immintrin.h>

#include <cmath>

#include "cidcassi/simd/kernels.hpp"

namespace cidcassi::simd {
namespace {

constexpr std::size_t kLanes = 4;

void multiply_accumulate(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d vd = _mm256_loadu_pd(dst + i);
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(va, vb, vd));
  }
  for (; i < n; ++i) dst[i] = std::fma(a[i], b[i], dst[i]);
}

void multiply(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void divide_offset(double* dst, const double* num, const double* den, double offset,
                   std::size_t n) {
  const __m256d voff = _mm256_set1_pd(offset);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_add_pd(_mm256_loadu_pd(den + i), voff);
    _mm256_storeu_pd(dst + i, _mm256_div_pd(_mm256_loadu_pd(num + i), d));
  }
  for (; i < n; ++i) dst[i] = num[i] / (den[i] + offset);
}

void subtract(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] - b[i];
}

// No FMA here: the result must match the scalar kernel bit for bit.
void tv_dual_step(double* px, double* py, const double* gx, const double* gy, double step,
                  std::size_t n) {
  const __m256d vstep = _mm256_set1_pd(step);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vgx = _mm256_loadu_pd(gx + i);
    const __m256d vgy = _mm256_loadu_pd(gy + i);
    const __m256d sq = _mm256_add_pd(_mm256_mul_pd(vgx, vgx), _mm256_mul_pd(vgy, vgy));
    const __m256d denom = _mm256_add_pd(one, _mm256_mul_pd(vstep, _mm256_sqrt_pd(sq)));
    const __m256d nx = _mm256_add_pd(_mm256_loadu_pd(px + i), _mm256_mul_pd(vstep, vgx));
    const __m256d ny = _mm256_add_pd(_mm256_loadu_pd(py + i), _mm256_mul_pd(vstep, vgy));
    _mm256_storeu_pd(px + i, _mm256_div_pd(nx, denom));
    _mm256_storeu_pd(py + i, _mm256_div_pd(ny, denom));
  }
  for (; i < n; ++i) {
    const double norm = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]);
    const double denom = 1.0 + step * norm;
    px[i] = (px[i] + step * gx[i]) / denom;
    py[i] = (py[i] + step * gy[i]) / denom;
  }
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes), _mm256_loadu_pd(b + i + kLanes), acc1);
  }
  for (; i + kLanes <= n; i += kLanes) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
  return sum;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable table{Backend::avx2, "avx2",   multiply_accumulate, multiply,
                                 divide_offset, subtract, tv_dual_step,        dot};
  return &table;
}

}  // namespace cidcassi::simd
