// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "cidcassi/error.hpp"
#include "cidcassi/simd/kernels.hpp"

namespace cidcassi::simd {

#ifndef CIDCASSI_HAVE_AVX2
const KernelTable* avx2_kernels() noexcept { return nullptr; }
#endif

bool avx2_available() noexcept {
#if defined(CIDCASSI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported;
#else
  return false;
#endif
}

namespace {

const KernelTable* automatic_choice() noexcept {
  const char* env = std::getenv("CIDCASSI_SIMD");
  const std::string request = env ? env : "";
  if (request == "scalar") return &scalar_kernels();
  if (avx2_available()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{automatic_choice()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() noexcept { return *active_slot().load(); }

void select_backend(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      active_slot().store(&scalar_kernels());
      return;
    case Backend::avx2:
      if (!avx2_available()) throw ConfigError("AVX2 kernels are not available on this build/CPU");
      active_slot().store(avx2_kernels());
      return;
  }
}

void reset_backend() noexcept { active_slot().store(automatic_choice()); }

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

}  // namespace cidcassi::simd
