// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cidcassi/error.hpp"
#include "cidcassi/simd/kernels.hpp"

namespace cidcassi {

IntensityMap band_mean(const SpectralCube& cube) {
  IntensityMap intensity(cube.height(), cube.width(), 0.0);
  auto out = intensity.values();
  // Band-ordered accumulation keeps the sum order fixed per pixel.
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    const auto plane = cube.band(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += plane[i];
  }
  const double n = static_cast<double>(cube.bands());
  for (double& v : out) v /= n;
  return intensity;
}

Decomposition decompose(const SpectralCube& cube, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("decompose: epsilon must be finite and >= 0");
  }
  if (cube.bands() == 0) throw ShapeError("decompose: cube has no bands");
  cube.validate();

  IntensityMap intensity = band_mean(cube);
  if (epsilon == 0.0) {
    for (std::size_t r = 0; r < intensity.height(); ++r) {
      for (std::size_t c = 0; c < intensity.width(); ++c) {
        if (intensity.at(r, c) <= 0.0) {
          std::ostringstream msg;
          msg << "decompose: zero intensity at pixel (" << r << ", " << c
              << ") with epsilon = 0";
          throw DivisionHazardError(msg.str());
        }
      }
    }
  }

  const auto& k = simd::active_kernels();
  SpectralCube chroma(cube.height(), cube.width(), cube.bands());
  const auto inten = intensity.values();
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    k.divide_offset(chroma.band(b).data(), cube.band(b).data(), inten.data(), epsilon,
                    inten.size());
  }
  return {std::move(intensity), std::move(chroma)};
}

SpectralCube recompose(const SpectralCube& chromaticity, const IntensityMap& intensity) {
  if (chromaticity.height() != intensity.height() || chromaticity.width() != intensity.width()) {
    std::ostringstream msg;
    msg << "recompose: chromaticity is " << chromaticity.shape_string() << " but intensity is "
        << intensity.height() << "x" << intensity.width();
    throw ShapeError(msg.str());
  }
  const auto& k = simd::active_kernels();
  SpectralCube out(chromaticity.height(), chromaticity.width(), chromaticity.bands());
  for (std::size_t b = 0; b < out.bands(); ++b) {
    k.multiply(out.band(b).data(), chromaticity.band(b).data(), intensity.values().data(),
               out.plane_size());
  }
  return out;
}

SpectralCube recompose(const SpectralCube& chromaticity, const GuidanceCube& guidance) {
  if (chromaticity.height() != guidance.height() || chromaticity.width() != guidance.width() ||
      chromaticity.bands() != guidance.bands()) {
    throw ShapeError("recompose: guidance dims do not match chromaticity " +
                     chromaticity.shape_string());
  }
  const auto& k = simd::active_kernels();
  SpectralCube out(chromaticity.height(), chromaticity.width(), chromaticity.bands());
  for (std::size_t b = 0; b < out.bands(); ++b) {
    k.multiply(out.band(b).data(), chromaticity.band(b).data(), guidance.plane(b).data(),
               out.plane_size());
  }
  return out;
}

Eigen::MatrixXd spectral_correlation(const SpectralCube& cube) {
  const std::size_t nb = cube.bands();
  if (nb < 2) throw ShapeError("spectral_correlation: need at least 2 bands");
  const std::size_t np = cube.plane_size();
  if (np < 2) throw ShapeError("spectral_correlation: need at least 2 pixels");

  // Two-pass: centre each band, then take normalised inner products.
  std::vector<std::vector<double>> centred(nb, std::vector<double>(np));
  std::vector<double> norms(nb);
  std::vector<std::size_t> flat;
  const auto& k = simd::scalar_kernels();
  for (std::size_t b = 0; b < nb; ++b) {
    const auto plane = cube.band(b);
    double mean = 0.0;
    for (double v : plane) mean += v;
    mean /= static_cast<double>(np);
    for (std::size_t i = 0; i < np; ++i) centred[b][i] = plane[i] - mean;
    norms[b] = std::sqrt(k.dot(centred[b].data(), centred[b].data(), np));
    const auto [lo, hi] = std::minmax_element(plane.begin(), plane.end());
    if (*lo == *hi || !(norms[b] > 0.0)) flat.push_back(b);
  }
  if (!flat.empty()) {
    std::ostringstream msg;
    msg << "spectral_correlation: zero-variance band(s):";
    for (auto b : flat) msg << ' ' << b;
    throw StatisticsError(msg.str());
  }

  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(nb, nb);
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = i + 1; j < nb; ++j) {
      const double cov = k.dot(centred[i].data(), centred[j].data(), np);
      const double r = std::clamp(cov / (norms[i] * norms[j]), -1.0, 1.0);
      corr(i, j) = r;
      corr(j, i) = r;
    }
  }
  return corr;
}

GuidanceCube expand_rgb_guidance(const RgbImage& rgb, std::span<const double> band_centers,
                                 const std::array<double, 3>& anchor_centers) {
  if (!(anchor_centers[0] < anchor_centers[1] && anchor_centers[1] < anchor_centers[2])) {
    throw ConfigError("expand_rgb_guidance: anchor centres must be strictly increasing");
  }
  if (band_centers.empty()) throw ConfigError("expand_rgb_guidance: no band centres");
  const Plane& first = rgb.channels[0];
  for (const auto& ch : rgb.channels) {
    if (!ch.same_shape(first)) throw ShapeError("expand_rgb_guidance: channel dims differ");
  }

  const std::size_t h = first.height();
  const std::size_t w = first.width();
  SpectralCube out(h, w, band_centers.size());
  for (std::size_t b = 0; b < band_centers.size(); ++b) {
    const double x = std::clamp(band_centers[b], anchor_centers[0], anchor_centers[2]);
    const std::size_t seg = x < anchor_centers[1] ? 0 : 1;
    const double t = (x - anchor_centers[seg]) / (anchor_centers[seg + 1] - anchor_centers[seg]);
    const auto lo = rgb.channels[seg].values();
    const auto hi = rgb.channels[seg + 1].values();
    auto dst = out.band(b);
    // lo + t*(hi - lo) reproduces constants exactly; t == 1 only happens at the last knot.
    if (t >= 1.0) {
      std::copy(hi.begin(), hi.end(), dst.begin());
    } else {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = lo[i] + t * (hi[i] - lo[i]);
    }
  }
  return GuidanceCube::rgb_expanded(std::move(out));
}

}  // namespace cidcassi
