// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cidcassi {

/// Dense row-major 2-D array of doubles.
///
/// Strong types for the different roles a plane plays (intensity, mask,
/// measurement) derive from it so they cannot be swapped by accident.
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t height, std::size_t width, double fill = 0.0);
  Plane(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& at(std::size_t row, std::size_t col) noexcept { return values_[row * width_ + col]; }
  double at(std::size_t row, std::size_t col) const noexcept { return values_[row * width_ + col]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * width_, width_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * width_, width_};
  }

  bool same_shape(const Plane& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

/// Per-pixel mean spectral energy. Nonnegative.
class IntensityMap : public Plane {
 public:
  using Plane::Plane;
  explicit IntensityMap(Plane plane) : Plane(std::move(plane)) {}
  /// Throws DomainError on a negative or non-finite value.
  void validate() const;
};

/// Coded aperture transmission, values in [0, 1].
class CodedMask : public Plane {
 public:
  using Plane::Plane;
  explicit CodedMask(Plane plane) : Plane(std::move(plane)) {}
  void validate() const;
};

/// 2-D detector reading, extended along the dispersion axis. May be negative
/// once noise has been added.
class Measurement : public Plane {
 public:
  using Plane::Plane;
  explicit Measurement(Plane plane) : Plane(std::move(plane)) {}
};

/// H x W x bands volume, band-major: band slowest, then row, then column.
///
/// Holds radiance, chromaticity and solver iterates alike. Iterates are not
/// sign-constrained, so nonnegativity is checked by validate() at the entry
/// points that need it rather than enforced on every write.
class SpectralCube {
 public:
  SpectralCube() = default;
  SpectralCube(std::size_t height, std::size_t width, std::size_t bands, double fill = 0.0);
  SpectralCube(std::size_t height, std::size_t width, std::size_t bands,
               std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t bands() const noexcept { return bands_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& at(std::size_t band, std::size_t row, std::size_t col) noexcept {
    return values_[(band * height_ + row) * width_ + col];
  }
  double at(std::size_t band, std::size_t row, std::size_t col) const noexcept {
    return values_[(band * height_ + row) * width_ + col];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> band(std::size_t b) noexcept {
    return {values_.data() + b * plane_size(), plane_size()};
  }
  std::span<const double> band(std::size_t b) const noexcept {
    return {values_.data() + b * plane_size(), plane_size()};
  }
  std::span<double> row(std::size_t b, std::size_t r) noexcept {
    return {values_.data() + (b * height_ + r) * width_, width_};
  }
  std::span<const double> row(std::size_t b, std::size_t r) const noexcept {
    return {values_.data() + (b * height_ + r) * width_, width_};
  }

  Plane band_plane(std::size_t b) const;

  bool same_shape(const SpectralCube& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && bands_ == other.bands_;
  }
  std::string shape_string() const;

  /// Checks that every value is finite and >= 0; throws DomainError otherwise.
  void validate() const;

  friend bool operator==(const SpectralCube&, const SpectralCube&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> values_;
};

enum class GuidanceMode { pan, rgb_expanded };

/// Per-band intensity used to weight the coded mask.
///
/// PAN guidance keeps a single plane and serves it for every band; the
/// RGB-expanded form keeps one plane per band.
class GuidanceCube {
 public:
  GuidanceCube() = default;

  static GuidanceCube pan(const IntensityMap& intensity, std::size_t bands);
  static GuidanceCube rgb_expanded(SpectralCube per_band);
  /// Guidance of ones: the plain binary-mask CASSI model.
  static GuidanceCube unit(std::size_t height, std::size_t width, std::size_t bands);

  GuidanceMode mode() const noexcept { return mode_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t bands() const noexcept { return bands_; }

  std::span<const double> plane(std::size_t band) const noexcept;
  double at(std::size_t band, std::size_t row, std::size_t col) const noexcept {
    return plane(band)[row * width_ + col];
  }

 private:
  GuidanceMode mode_ = GuidanceMode::pan;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> values_;
};

}  // namespace cidcassi
