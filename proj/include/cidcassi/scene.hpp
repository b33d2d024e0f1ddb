// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "cidcassi/cube.hpp"

namespace cidcassi {

enum class SceneGenerator { blobs, gradients, checkerboard };

/// Synthetic scene description. JSON form:
///   {"height": 64, "width": 64, "bands": 8, "generator": "blobs",
///    "seed": 7, "blobs": 6}
/// generator is one of "blobs", "gradients", "checkerboard"; "blobs" and
/// "cell" (checkerboard cell size, 0 = automatic) are optional.
struct SceneSpec {
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t bands = 8;
  SceneGenerator generator = SceneGenerator::blobs;
  std::uint64_t seed = 0;
  std::size_t blobs = 6;
  std::size_t cell = 0;

  void validate() const;
};

SceneSpec parse_scene_spec(std::string_view json_text);
SceneSpec load_scene_spec(const std::filesystem::path& path);
std::string scene_spec_to_json(const SceneSpec& spec);

/// Deterministic scene with values in [0, 1] and every pixel's band mean
/// strictly positive.
///
///  - blobs: constant background spectrum plus `blobs` filled ellipses, each
///    with its own constant spectrum. Every blob sits in its own grid cell
///    with at least a one-pixel margin, so blobs never touch.
///  - gradients: every band a smooth mix of ramps and a low-frequency sinusoid.
///  - checkerboard: square cells whose spectra ramp up or down with the band
///    index depending on cell parity, scaled by a per-cell brightness.
SpectralCube generate_scene(const SceneSpec& spec);

std::string_view generator_name(SceneGenerator g) noexcept;

}  // namespace cidcassi
