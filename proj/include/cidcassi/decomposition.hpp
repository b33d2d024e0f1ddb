// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <array>
#include <span>

#include "cidcassi/cube.hpp"

namespace cidcassi {

inline constexpr double kDefaultEpsilon = 1e-6;

struct Decomposition {
  IntensityMap intensity;
  SpectralCube chromaticity;
};

/// Splits a radiance cube into per-pixel mean intensity and chromaticity
///   I(u,v)   = mean over bands of X(u,v,.)
///   C(u,v,b) = X(u,v,b) / (I(u,v) + epsilon)
/// epsilon may be 0 only when every pixel has positive intensity; otherwise
/// DivisionHazardError names the first offending pixel.
Decomposition decompose(const SpectralCube& cube, double epsilon = kDefaultEpsilon);

/// X(u,v,b) = C(u,v,b) * I(u,v).
SpectralCube recompose(const SpectralCube& chromaticity, const IntensityMap& intensity);

/// Per-band guidance variant: X(u,v,b) = C(u,v,b) * G(u,v,b).
SpectralCube recompose(const SpectralCube& chromaticity, const GuidanceCube& guidance);

/// Per-pixel mean over bands (the intensity half of decompose).
IntensityMap band_mean(const SpectralCube& cube);

/// Pearson correlation between every pair of bands over all pixels.
/// Symmetric with a unit diagonal. Throws StatisticsError listing every
/// zero-variance band.
Eigen::MatrixXd spectral_correlation(const SpectralCube& cube);

/// Planar 3-channel image (R, G, B planes, each H x W).
struct RgbImage {
  std::array<Plane, 3> channels;
};

/// Interpolates three colour channels onto the cube's band centres,
/// piecewise linearly between anchor centres and clamped outside them.
GuidanceCube expand_rgb_guidance(const RgbImage& rgb, std::span<const double> band_centers,
                                 const std::array<double, 3>& anchor_centers);

}  // namespace cidcassi
