// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops shared by the sensing operator, the TV prox and
// the decomposition. Every kernel has a scalar reference implementation; an
// AVX2 variant is compiled in a separate translation unit and picked at
// runtime when the CPU supports it.
//
// The elementwise kernels that involve only +, -, *, / and sqrt produce
// bit-identical results on every backend. multiply_accumulate and dot may
// differ in the last bits (FMA contraction, lane-wise reduction order); each
// backend is still deterministic run to run.

#include <cstddef>
#include <string_view>

namespace cidcassi::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  Backend backend;
  std::string_view name;

  /// dst[i] += a[i] * b[i]
  void (*multiply_accumulate)(double* dst, const double* a, const double* b, std::size_t n);
  /// dst[i] = a[i] * b[i]
  void (*multiply)(double* dst, const double* a, const double* b, std::size_t n);
  /// dst[i] = num[i] / (den[i] + offset)
  void (*divide_offset)(double* dst, const double* num, const double* den, double offset,
                        std::size_t n);
  /// dst[i] = a[i] - b[i]
  void (*subtract)(double* dst, const double* a, const double* b, std::size_t n);
  /// Chambolle dual step on one row:
  ///   px[i] = (px[i] + step*gx[i]) / (1 + step*sqrt(gx[i]^2 + gy[i]^2)), same for py.
  void (*tv_dual_step)(double* px, double* py, const double* gx, const double* gy, double step,
                       std::size_t n);
  /// sum a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// AVX2 table, or nullptr when it was not compiled in.
const KernelTable* avx2_kernels() noexcept;

/// True when the AVX2 table is compiled in and the CPU reports AVX2 and FMA.
bool avx2_available() noexcept;

/// The table used by the library. Chosen on first use: the best available
/// backend, unless CIDCASSI_SIMD=scalar|avx2 is set in the environment.
const KernelTable& active_kernels() noexcept;

/// Overrides the active backend. Throws ConfigError if it is unavailable.
void select_backend(Backend backend);

/// Restores the automatic choice.
void reset_backend() noexcept;

std::string_view backend_name(Backend backend) noexcept;

}  // namespace cidcassi::simd
