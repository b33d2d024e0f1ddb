// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "cidcassi/error.hpp"
#include "cidcassi/prox.hpp"
#include "cidcassi/simd/kernels.hpp"

namespace cidcassi {
namespace {

// Forward differences; the last column of gx and last row of gy are zero.
void gradient(const double* t, double* gx, double* gy, std::size_t h, std::size_t w,
              const simd::KernelTable& k) {
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = t + r * w;
    double* gxr = gx + r * w;
    double* gyr = gy + r * w;
    if (w > 1) k.subtract(gxr, row + 1, row, w - 1);
    gxr[w - 1] = 0.0;
    if (r + 1 < h) {
      k.subtract(gyr, row + w, row, w);
    } else {
      for (std::size_t c = 0; c < w; ++c) gyr[c] = 0.0;
    }
  }
}

// Negative adjoint of gradient().
void divergence(const double* px, const double* py, double* div, std::size_t h, std::size_t w) {
  for (std::size_t r = 0; r < h; ++r) {
    const double* pxr = px + r * w;
    const double* pyr = py + r * w;
    const double* pyu = r > 0 ? py + (r - 1) * w : nullptr;
    double* out = div + r * w;
    for (std::size_t c = 0; c < w; ++c) {
      double v = (c + 1 < w ? pxr[c] : 0.0) - (c > 0 ? pxr[c - 1] : 0.0);
      v += (r + 1 < h ? pyr[c] : 0.0) - (pyu ? pyu[c] : 0.0);
      out[c] = v;
    }
  }
}

void denoise_band(std::span<const double> in, std::span<double> out, std::size_t h, std::size_t w,
                  double weight, std::size_t iters, double step, const simd::KernelTable& k) {
  const std::size_t n = h * w;
  std::vector<double> px(n, 0.0), py(n, 0.0), gx(n), gy(n), div(n), t(n);
  for (std::size_t it = 0; it < iters; ++it) {
    divergence(px.data(), py.data(), div.data(), h, w);
    for (std::size_t i = 0; i < n; ++i) t[i] = div[i] - in[i] / weight;
    gradient(t.data(), gx.data(), gy.data(), h, w, k);
    for (std::size_t r = 0; r < h; ++r) {
      k.tv_dual_step(px.data() + r * w, py.data() + r * w, gx.data() + r * w, gy.data() + r * w,
                     step, w);
    }
  }
  divergence(px.data(), py.data(), div.data(), h, w);
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] - weight * div[i];
}

}  // namespace

SpectralCube tv_denoise(const SpectralCube& cube, double weight, std::size_t inner_iters,
                        double step) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw ConfigError("tv_denoise: weight must be finite and >= 0");
  }
  if (inner_iters == 0) throw ConfigError("tv_denoise: inner_iters must be >= 1");
  if (!(step > 0.0)) throw ConfigError("tv_denoise: step must be > 0");
  if (weight == 0.0 || cube.empty()) return cube;

  const auto& k = simd::active_kernels();
  SpectralCube out(cube.height(), cube.width(), cube.bands());
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    denoise_band(cube.band(b), out.band(b), cube.height(), cube.width(), weight, inner_iters,
                 step, k);
  }
  return out;
}

SpectralCube identity_denoise(const SpectralCube& cube, double /*weight*/) { return cube; }

double total_variation(const SpectralCube& cube) {
  const std::size_t h = cube.height();
  const std::size_t w = cube.width();
  double tv = 0.0;
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const double v = cube.at(b, r, c);
        const double dx = c + 1 < w ? cube.at(b, r, c + 1) - v : 0.0;
        const double dy = r + 1 < h ? cube.at(b, r + 1, c) - v : 0.0;
        tv += std::sqrt(dx * dx + dy * dy);
      }
    }
  }
  return tv;
}

double tv_objective(const SpectralCube& z, const SpectralCube& reference, double weight) {
  if (!z.same_shape(reference)) throw ShapeError("tv_objective: shape mismatch");
  double fit = 0.0;
  const auto a = z.values();
  const auto b = reference.values();
  for (std::size_t i = 0; i < a.size(); ++i) fit += (a[i] - b[i]) * (a[i] - b[i]);
  return 0.5 * fit + weight * total_variation(z);
}

TvDenoiser::TvDenoiser(std::size_t inner_iters, double step)
    : inner_iters_(inner_iters), step_(step) {
  if (inner_iters_ == 0) throw ConfigError("TvDenoiser: inner_iters must be >= 1");
  if (!(step_ > 0.0)) throw ConfigError("TvDenoiser: step must be > 0");
}

}  // namespace cidcassi
