// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "cidcassi/prox.hpp"
#include "cidcassi/random.hpp"
#include "cidcassi/sensing.hpp"
#include "cidcassi/simd/kernels.hpp"
#include "support/oracles.hpp"

namespace {

using namespace cidcassi;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

class SimdEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::avx2_available()) GTEST_SKIP() << "AVX2 not available on this machine";
    fast_ = simd::avx2_kernels();
  }
  void TearDown() override { simd::reset_backend(); }

  const simd::KernelTable& ref_ = simd::scalar_kernels();
  const simd::KernelTable* fast_ = nullptr;
};

// Lengths cover empty input, tails shorter than a vector and several full blocks.
constexpr std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 63, 64, 129};

TEST_F(SimdEquivalence, ElementwiseKernelsAreBitIdentical) {
  for (std::size_t n : kLengths) {
    const auto a = random_vector(n, 1 + n);
    const auto b = random_vector(n, 100 + n, 0.1, 2.0);
    std::vector<double> x(n), y(n);

    ref_.multiply(x.data(), a.data(), b.data(), n);
    fast_->multiply(y.data(), a.data(), b.data(), n);
    EXPECT_EQ(x, y) << "multiply n=" << n;

    ref_.subtract(x.data(), a.data(), b.data(), n);
    fast_->subtract(y.data(), a.data(), b.data(), n);
    EXPECT_EQ(x, y) << "subtract n=" << n;

    ref_.divide_offset(x.data(), a.data(), b.data(), 1e-6, n);
    fast_->divide_offset(y.data(), a.data(), b.data(), 1e-6, n);
    EXPECT_EQ(x, y) << "divide_offset n=" << n;
  }
}

TEST_F(SimdEquivalence, TvDualStepIsBitIdentical) {
  for (std::size_t n : kLengths) {
    const auto gx = random_vector(n, 7 + n);
    const auto gy = random_vector(n, 9 + n);
    auto px1 = random_vector(n, 11 + n, -0.5, 0.5);
    auto py1 = random_vector(n, 13 + n, -0.5, 0.5);
    auto px2 = px1;
    auto py2 = py1;
    ref_.tv_dual_step(px1.data(), py1.data(), gx.data(), gy.data(), 0.25, n);
    fast_->tv_dual_step(px2.data(), py2.data(), gx.data(), gy.data(), 0.25, n);
    EXPECT_EQ(px1, px2) << "n=" << n;
    EXPECT_EQ(py1, py2) << "n=" << n;
  }
}

TEST_F(SimdEquivalence, ReductionsAgreeToRounding) {
  for (std::size_t n : kLengths) {
    const auto a = random_vector(n, 21 + n);
    const auto b = random_vector(n, 23 + n);
    auto acc1 = random_vector(n, 25 + n);
    auto acc2 = acc1;
    ref_.multiply_accumulate(acc1.data(), a.data(), b.data(), n);
    fast_->multiply_accumulate(acc2.data(), a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(acc1[i], acc2[i], 1e-15);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
    EXPECT_NEAR(ref_.dot(a.data(), b.data(), n), fast_->dot(a.data(), b.data(), n),
                1e-14 * (scale + 1.0));
  }
}

TEST_F(SimdEquivalence, OperatorAndProxAgreeAcrossBackends) {
  const auto mask = oracle::random_mask(16, 16, 5);
  const auto x = oracle::random_cube(16, 16, 8, 6);
  const auto op = build_operator(mask, GuidanceCube::unit(16, 16, 8), 2,
                                 DispersionAxis::horizontal, {16, 16, 8});

  simd::select_backend(simd::Backend::scalar);
  const Measurement y_ref = apply_forward(op, x);
  const SpectralCube back_ref = apply_adjoint(op, y_ref);
  const SpectralCube tv_ref = tv_denoise(x, 0.1);

  simd::select_backend(simd::Backend::avx2);
  const Measurement y_fast = apply_forward(op, x);
  const SpectralCube back_fast = apply_adjoint(op, y_ref);
  const SpectralCube tv_fast = tv_denoise(x, 0.1);

  for (std::size_t i = 0; i < y_ref.size(); ++i)
    EXPECT_NEAR(y_ref.values()[i], y_fast.values()[i], 1e-14);
  EXPECT_EQ(back_ref, back_fast);
  EXPECT_EQ(tv_ref, tv_fast);
}

TEST(SimdDispatch, ScalarCanBeForced) {
  simd::select_backend(simd::Backend::scalar);
  EXPECT_EQ(simd::active_kernels().backend, simd::Backend::scalar);
  simd::reset_backend();
  if (simd::avx2_available() && std::getenv("CIDCASSI_SIMD") == nullptr) {
    EXPECT_EQ(simd::active_kernels().backend, simd::Backend::avx2);
  }
}

TEST(SimdDispatch, UnavailableBackendIsRejected) {
  if (simd::avx2_available()) GTEST_SKIP() << "AVX2 present";
  EXPECT_ANY_THROW(simd::select_backend(simd::Backend::avx2));
}

TEST(SimdDispatch, BackendNames) {
  EXPECT_EQ(simd::backend_name(simd::Backend::scalar), "scalar");
  EXPECT_EQ(simd::backend_name(simd::Backend::avx2), "avx2");
}

}  // namespace
