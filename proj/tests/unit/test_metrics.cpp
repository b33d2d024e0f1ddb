// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "cidcassi/error.hpp"
#include "cidcassi/metrics.hpp"
#include "cidcassi/random.hpp"
#include "support/oracles.hpp"

namespace {

using namespace cidcassi;

Plane formula_plane(double (*f)(double, double)) {
  Plane p(32, 32);
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) p.at(r, c) = f(static_cast<double>(r), static_cast<double>(c));
  return p;
}

Plane random_plane(std::size_t h, std::size_t w, std::uint64_t seed) {
  Rng rng(seed);
  Plane p(h, w);
  for (double& v : p.values()) v = rng.uniform();
  return p;
}

TEST(Psnr, Identical) {
  const auto p = random_plane(8, 8, 1);
  EXPECT_EQ(psnr(p, p), kPsnrIdentical);
  EXPECT_TRUE(std::isinf(psnr(p, p)));
}

TEST(Psnr, ClosedForm) {
  EXPECT_NEAR(psnr(Plane(4, 4, 0.0), Plane(4, 4, 0.1)), 20.0, 1e-12);
}

TEST(Psnr, MatchesLoopAndIsSymmetric) {
  const auto a = random_plane(17, 13, 2), b = random_plane(17, 13, 3);
  const std::vector<double> va(a.values().begin(), a.values().end());
  const std::vector<double> vb(b.values().begin(), b.values().end());
  EXPECT_NEAR(psnr(a, b), oracle::psnr_loop(va, vb, 1.0), 1e-10);
  EXPECT_NEAR(psnr(a, b, 2.5), oracle::psnr_loop(va, vb, 2.5), 1e-10);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
}

TEST(Psnr, DecreasesWithNoise) {
  const auto a = random_plane(32, 32, 4);
  double last = INFINITY;
  for (double sigma : {0.01, 0.05, 0.1}) {
    Plane b = a;
    Rng rng(99);
    for (double& v : b.values()) v += sigma * rng.normal();
    const double p = psnr(a, b);
    EXPECT_LT(p, last);
    last = p;
  }
}

TEST(Psnr, ShapeMismatchAndRange) {
  EXPECT_THROW(psnr(Plane(2, 2), Plane(2, 3)), ShapeError);
  EXPECT_THROW(psnr(Plane(2, 2), Plane(2, 2), 0.0), ConfigError);
}

TEST(Ssim, IdenticalAndConstants) {
  const auto a = random_plane(16, 16, 5);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  EXPECT_NEAR(ssim(Plane(12, 12, 0.3), Plane(12, 12, 0.7)), oracle::ssim_constants(0.3, 0.7, 1.0),
              1e-12);
  EXPECT_NEAR(ssim(Plane(12, 12, 0.3), Plane(12, 12, 0.7), 2.0),
              oracle::ssim_constants(0.3, 0.7, 2.0), 1e-12);
}

TEST(Ssim, MatchesBruteForceWindows) {
  const auto a = random_plane(20, 23, 6), b = random_plane(20, 23, 7);
  EXPECT_NEAR(ssim(a, b), oracle::ssim_brute(a, b, 1.0), 1e-12);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-15);
}

// Reference values from scikit-image structural_similarity with
// gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=1.
TEST(Ssim, MatchesReferenceImplementation) {
  const Plane smooth = formula_plane([](double r, double c) { return 0.5 + 0.4 * std::sin(0.3 * r + 0.2 * c); });
  const Plane ripple = formula_plane([](double r, double c) {
    return 0.5 + 0.4 * std::sin(0.3 * r + 0.2 * c) + 0.05 * std::cos(0.9 * r * 0.5 + 1.3 * c);
  });
  EXPECT_NEAR(ssim(smooth, ripple), 0.9589977605066944, 1e-6);

  const Plane ramp = formula_plane([](double r, double c) { return (r + c) / 62.0; });
  const Plane checker = formula_plane([](double r, double c) {
    return 0.3 + 0.4 * static_cast<double>((static_cast<int>(r) / 4 + static_cast<int>(c) / 4) % 2);
  });
  EXPECT_NEAR(ssim(ramp, checker), 0.021309122676950024, 1e-6);

  const Plane base = formula_plane([](double r, double c) {
    return 0.2 + 0.6 * std::cos(0.15 * r) * std::pow(std::sin(0.25 * c), 2);
  });
  const Plane scaled = formula_plane([](double r, double c) {
    return 0.8 * (0.2 + 0.6 * std::cos(0.15 * r) * std::pow(std::sin(0.25 * c), 2)) + 0.02;
  });
  EXPECT_NEAR(ssim(base, scaled), 0.889504517183326, 1e-6);
}

TEST(Ssim, TooSmall) { EXPECT_THROW(ssim(Plane(10, 20), Plane(10, 20)), ConfigError); }

TEST(Evaluate, IdenticalCube) {
  const auto x = oracle::random_cube(12, 12, 3, 8);
  const auto r = evaluate_cube(x, x);
  EXPECT_TRUE(std::isinf(r.mean_psnr));
  EXPECT_NEAR(r.mean_ssim, 1.0, 1e-12);
  EXPECT_EQ(r.data_range, 1.0);
}

TEST(Evaluate, OneCorruptedBand) {
  const auto x = oracle::random_cube(12, 12, 3, 9);
  auto y = x;
  for (double& v : y.band(1)) v *= 0.9;
  const auto r = evaluate_cube(x, y);
  EXPECT_TRUE(std::isinf(r.band_psnr[0]));
  EXPECT_TRUE(std::isinf(r.band_psnr[2]));
  EXPECT_FALSE(std::isinf(r.band_psnr[1]));
  EXPECT_NEAR(r.band_ssim[0], 1.0, 1e-12);
  EXPECT_LT(r.band_ssim[1], 1.0);
}

TEST(Evaluate, MeansArePerBandAverages) {
  const auto x = oracle::random_cube(14, 13, 4, 10);
  const auto y = oracle::random_cube(14, 13, 4, 11);
  const auto r = evaluate_cube(x, y);
  double ps = 0.0, ss = 0.0;
  for (std::size_t b = 0; b < 4; ++b) {
    const std::vector<double> va(x.band(b).begin(), x.band(b).end());
    const std::vector<double> vb(y.band(b).begin(), y.band(b).end());
    ps += oracle::psnr_loop(va, vb, 1.0);
    ss += oracle::ssim_brute(x.band_plane(b), y.band_plane(b), 1.0);
  }
  EXPECT_NEAR(r.mean_psnr, ps / 4.0, 1e-10);
  EXPECT_NEAR(r.mean_ssim, ss / 4.0, 1e-12);
  EXPECT_THROW(evaluate_cube(x, oracle::random_cube(14, 13, 3, 1)), ShapeError);
}

}  // namespace
