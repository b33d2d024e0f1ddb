// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "cidcassi/decomposition.hpp"
#include "cidcassi/error.hpp"
#include "support/oracles.hpp"

namespace {

using namespace cidcassi;

TEST(Cube, BandMajorLayout) {
  SpectralCube cube(2, 3, 2);
  cube.at(1, 0, 2) = 5.0;
  EXPECT_EQ(cube.values()[1 * 6 + 0 * 3 + 2], 5.0);
  EXPECT_EQ(cube.band(1)[2], 5.0);
  EXPECT_EQ(cube.shape_string(), "2x3x2");
}

TEST(Cube, ValidateRejectsNegativeAndNonFinite) {
  SpectralCube cube(2, 2, 1, 0.5);
  EXPECT_NO_THROW(cube.validate());
  cube.at(0, 1, 1) = -0.1;
  EXPECT_THROW(cube.validate(), DomainError);
  cube.at(0, 1, 1) = NAN;
  EXPECT_THROW(cube.validate(), DomainError);
}

TEST(Cube, RejectsWrongValueCount) {
  EXPECT_THROW(SpectralCube(2, 2, 2, std::vector<double>(7, 0.0)), ShapeError);
}

TEST(Decompose, ConstantCube) {
  const auto d = decompose(SpectralCube(3, 4, 5, 0.5), 0.0);
  for (double v : d.intensity.values()) EXPECT_EQ(v, 0.5);
  for (double v : d.chromaticity.values()) EXPECT_EQ(v, 1.0);
}

TEST(Decompose, TwoBandPixel) {
  const auto d = decompose(SpectralCube(1, 1, 2, {0.2, 0.6}), 0.0);
  EXPECT_DOUBLE_EQ(d.intensity.at(0, 0), 0.4);
  EXPECT_DOUBLE_EQ(d.chromaticity.at(0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.chromaticity.at(1, 0, 0), 1.5);
}

TEST(Decompose, EpsilonShrinksBandMean) {
  const auto x = oracle::random_cube(6, 5, 4, 11, {0.05, 1.0});
  const double eps = 1e-2;
  const auto d = decompose(x, eps);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      double mean = 0.0;
      for (std::size_t b = 0; b < 4; ++b) mean += d.chromaticity.at(b, r, c);
      mean /= 4.0;
      const double i = d.intensity.at(r, c);
      EXPECT_NEAR(mean, i / (i + eps), 1e-14);
      EXPECT_LT(mean, 1.0);
    }
  }
}

TEST(Decompose, UnitBandMeanAtZeroEpsilon) {
  const auto x = oracle::random_cube(8, 8, 7, 12, {0.01, 1.0});
  const auto d = decompose(x, 0.0);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      double mean = 0.0;
      for (std::size_t b = 0; b < 7; ++b) mean += d.chromaticity.at(b, r, c);
      EXPECT_NEAR(mean / 7.0, 1.0, 1e-14);
    }
  }
}

TEST(Decompose, ZeroIntensityAtZeroEpsilonNamesPixel) {
  SpectralCube x(3, 3, 2, 0.5);
  x.at(0, 1, 2) = 0.0;
  x.at(1, 1, 2) = 0.0;
  try {
    decompose(x, 0.0);
    FAIL() << "expected DivisionHazardError";
  } catch (const DivisionHazardError& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 2)"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(decompose(x, 1e-6));
}

TEST(Decompose, RejectsInvalidCube) {
  SpectralCube x(2, 2, 2, 0.5);
  x.at(0, 0, 0) = -1.0;
  EXPECT_THROW(decompose(x), DomainError);
}

TEST(Recompose, RoundTripIsExactToRounding) {
  const auto x = oracle::random_cube(8, 8, 5, 13, {0.01, 1.0});
  const auto d = decompose(x, 0.0);
  const auto back = recompose(d.chromaticity, d.intensity);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(back.values()[i], x.values()[i], 4e-16 * x.values()[i] + 1e-300);
  }
}

TEST(Recompose, UnitChromaticityCopiesIntensity) {
  IntensityMap intensity{Plane(2, 2, {0.1, 0.2, 0.3, 0.4})};
  const auto x = recompose(SpectralCube(2, 2, 3, 1.0), intensity);
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(x.band(b)[i], intensity.values()[i]);
}

TEST(Recompose, TwoBandPixel) {
  IntensityMap intensity{Plane(1, 1, 0.4)};
  const auto x = recompose(SpectralCube(1, 1, 2, {0.5, 1.5}), intensity);
  EXPECT_DOUBLE_EQ(x.at(0, 0, 0), 0.2);
  EXPECT_DOUBLE_EQ(x.at(1, 0, 0), 0.6);
}

TEST(Recompose, ShapeMismatch) {
  IntensityMap intensity{Plane(2, 3, 1.0)};
  EXPECT_THROW(recompose(SpectralCube(3, 2, 2, 1.0), intensity), ShapeError);
}

TEST(Recompose, PerBandGuidance) {
  SpectralCube g(1, 2, 2, {1.0, 2.0, 3.0, 4.0});
  const auto x = recompose(SpectralCube(1, 2, 2, 0.5), GuidanceCube::rgb_expanded(g));
  EXPECT_EQ(x.values()[0], 0.5);
  EXPECT_EQ(x.values()[3], 2.0);
}

TEST(Guidance, PanSharesOnePlane) {
  IntensityMap i{Plane(2, 2, {0.1, 0.2, 0.3, 0.4})};
  const auto g = GuidanceCube::pan(i, 5);
  EXPECT_EQ(g.mode(), GuidanceMode::pan);
  for (std::size_t b = 0; b < 5; ++b) EXPECT_EQ(g.at(b, 1, 0), 0.3);
  EXPECT_EQ(g.plane(0).data(), g.plane(4).data());
}

TEST(Guidance, RejectsNegativeIntensity) {
  IntensityMap i{Plane(1, 1, -0.5)};
  EXPECT_THROW(GuidanceCube::pan(i, 2), DomainError);
}

// Pearson correlation straight from the definition, pair by pair.
double pearson(std::span<const double> a, std::span<const double> b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Correlation, MatchesPairwiseOracle) {
  const auto x = oracle::random_cube(8, 8, 4, 14);
  const auto m = spectral_correlation(x);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(m(i, i), 1.0);
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(m(i, j), m(j, i));
      if (i != j) EXPECT_NEAR(m(i, j), pearson(x.band(i), x.band(j)), 1e-12);
    }
  }
}

TEST(Correlation, AffineBandsAreFullyCorrelated) {
  auto x = oracle::random_cube(6, 6, 3, 15);
  for (std::size_t k = 0; k < 36; ++k) x.band(2)[k] = 3.0 * x.band(0)[k] + 0.1;
  EXPECT_NEAR(spectral_correlation(x)(0, 2), 1.0, 1e-14);
}

TEST(Correlation, PositiveSemidefinite) {
  const auto x = oracle::random_cube(10, 10, 8, 16);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spectral_correlation(x));
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

TEST(Correlation, ZeroVarianceBandsAreListed) {
  auto x = oracle::random_cube(4, 4, 4, 17);
  for (double& v : x.band(1)) v = 0.3;
  for (double& v : x.band(3)) v = 0.0;
  try {
    spectral_correlation(x);
    FAIL() << "expected StatisticsError";
  } catch (const StatisticsError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('1'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }
}

TEST(Correlation, NeedsTwoBands) {
  EXPECT_THROW(spectral_correlation(SpectralCube(3, 3, 1, 0.5)), ShapeError);
}

RgbImage rgb_from(double r, double g, double b, std::size_t h = 2, std::size_t w = 2) {
  return RgbImage{{Plane(h, w, r), Plane(h, w, g), Plane(h, w, b)}};
}

TEST(RgbExpansion, KnotsReproduceChannels) {
  RgbImage rgb{{Plane(1, 2, {0.1, 0.7}), Plane(1, 2, {0.3, 0.2}), Plane(1, 2, {0.9, 0.4})}};
  const std::vector<double> centers{450.0, 550.0, 650.0};
  const auto g = expand_rgb_guidance(rgb, centers, {450.0, 550.0, 650.0});
  EXPECT_EQ(g.mode(), GuidanceMode::rgb_expanded);
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(g.at(b, 0, c), rgb.channels[b].at(0, c));
}

TEST(RgbExpansion, ConstantsStayConstant) {
  const std::vector<double> centers{400, 433, 471, 502, 550, 600, 640, 700};
  const auto g = expand_rgb_guidance(rgb_from(0.37, 0.37, 0.37), centers, {450, 550, 650});
  for (std::size_t b = 0; b < centers.size(); ++b) EXPECT_EQ(g.at(b, 1, 1), 0.37);
}

TEST(RgbExpansion, LinearBetweenAnchorsAndClampedOutside) {
  const std::vector<double> centers{-1.0, 0.5, 1.5, 3.0};
  const auto g = expand_rgb_guidance(rgb_from(0.0, 1.0, 0.0), centers, {0.0, 1.0, 2.0});
  EXPECT_EQ(g.at(0, 0, 0), 0.0);
  EXPECT_EQ(g.at(1, 0, 0), 0.5);
  EXPECT_EQ(g.at(2, 0, 0), 0.5);
  EXPECT_EQ(g.at(3, 0, 0), 0.0);
}

TEST(RgbExpansion, AnchorsMustIncrease) {
  const std::vector<double> centers{1.0, 2.0};
  EXPECT_THROW(expand_rgb_guidance(rgb_from(1, 1, 1), centers, {0.0, 2.0, 1.0}), ConfigError);
  EXPECT_THROW(expand_rgb_guidance(rgb_from(1, 1, 1), centers, {0.0, 0.0, 1.0}), ConfigError);
}

}  // namespace
