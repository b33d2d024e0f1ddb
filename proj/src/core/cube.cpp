// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/cube.hpp"

#include <cmath>
#include <sstream>

#include "cidcassi/error.hpp"

namespace cidcassi {

Plane::Plane(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), values_(height * width, fill) {}

Plane::Plane(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height * width) {
    std::ostringstream msg;
    msg << "plane " << height << "x" << width << " needs " << height * width << " values, got "
        << values_.size();
    throw ShapeError(msg.str());
  }
}

void IntensityMap::validate() const {
  for (std::size_t r = 0; r < height(); ++r) {
    for (std::size_t c = 0; c < width(); ++c) {
      const double v = at(r, c);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "intensity at (" << r << ", " << c << ") is " << v << "; must be finite and >= 0";
        throw DomainError(msg.str());
      }
    }
  }
}

void CodedMask::validate() const {
  for (std::size_t r = 0; r < height(); ++r) {
    for (std::size_t c = 0; c < width(); ++c) {
      const double v = at(r, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "mask value at (" << r << ", " << c << ") is " << v << "; must lie in [0, 1]";
        throw DomainError(msg.str());
      }
    }
  }
}

SpectralCube::SpectralCube(std::size_t height, std::size_t width, std::size_t bands, double fill)
    : height_(height), width_(width), bands_(bands), values_(height * width * bands, fill) {}

SpectralCube::SpectralCube(std::size_t height, std::size_t width, std::size_t bands,
                           std::vector<double> values)
    : height_(height), width_(width), bands_(bands), values_(std::move(values)) {
  if (values_.size() != height * width * bands) {
    std::ostringstream msg;
    msg << "cube " << height << "x" << width << "x" << bands << " needs "
        << height * width * bands << " values, got " << values_.size();
    throw ShapeError(msg.str());
  }
}

Plane SpectralCube::band_plane(std::size_t b) const {
  const auto src = band(b);
  return Plane(height_, width_, std::vector<double>(src.begin(), src.end()));
}

std::string SpectralCube::shape_string() const {
  std::ostringstream out;
  out << height_ << "x" << width_ << "x" << bands_;
  return out.str();
}

void SpectralCube::validate() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0) {
      const std::size_t b = i / plane_size();
      const std::size_t r = (i % plane_size()) / width_;
      const std::size_t c = i % width_;
      std::ostringstream msg;
      msg << "cube value at band " << b << ", pixel (" << r << ", " << c << ") is " << v
          << "; must be finite and >= 0";
      throw DomainError(msg.str());
    }
  }
}

GuidanceCube GuidanceCube::pan(const IntensityMap& intensity, std::size_t bands) {
  intensity.validate();
  GuidanceCube g;
  g.mode_ = GuidanceMode::pan;
  g.height_ = intensity.height();
  g.width_ = intensity.width();
  g.bands_ = bands;
  g.values_.assign(intensity.values().begin(), intensity.values().end());
  return g;
}

GuidanceCube GuidanceCube::rgb_expanded(SpectralCube per_band) {
  per_band.validate();
  GuidanceCube g;
  g.mode_ = GuidanceMode::rgb_expanded;
  g.height_ = per_band.height();
  g.width_ = per_band.width();
  g.bands_ = per_band.bands();
  g.values_.assign(per_band.values().begin(), per_band.values().end());
  return g;
}

GuidanceCube GuidanceCube::unit(std::size_t height, std::size_t width, std::size_t bands) {
  return pan(IntensityMap(height, width, 1.0), bands);
}

std::span<const double> GuidanceCube::plane(std::size_t band) const noexcept {
  const std::size_t n = height_ * width_;
  if (mode_ == GuidanceMode::pan) return {values_.data(), n};
  return {values_.data() + band * n, n};
}

}  // namespace cidcassi
