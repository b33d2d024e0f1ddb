// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <vector>

#include "cidcassi/error.hpp"
#include "cidcassi/random.hpp"

namespace cidcassi {
namespace {

using json = nlohmann::json;

std::vector<double> bump_spectrum(Rng& rng, std::size_t bands) {
  const double base = rng.uniform(0.05, 0.3);
  const double amp = rng.uniform(0.3, 0.65);
  const double centre = rng.uniform(0.0, static_cast<double>(bands - 1));
  const double width = rng.uniform(0.8, std::max(1.0, static_cast<double>(bands) / 2.0));
  std::vector<double> s(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const double x = (static_cast<double>(b) - centre) / width;
    s[b] = std::clamp(base + amp * std::exp(-0.5 * x * x), 0.0, 1.0);
  }
  return s;
}

SpectralCube blobs_scene(const SceneSpec& spec, Rng& rng) {
  const std::size_t h = spec.height;
  const std::size_t w = spec.width;
  const std::size_t nb = spec.bands;
  SpectralCube cube(h, w, nb);

  std::vector<double> background(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    background[b] = 0.15 + 0.05 * std::sin(static_cast<double>(b) * 0.7);
  }
  for (std::size_t b = 0; b < nb; ++b)
    std::fill(cube.band(b).begin(), cube.band(b).end(), background[b]);
  if (spec.blobs == 0) return cube;

  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.blobs))));
  const std::size_t rows = (spec.blobs + cols - 1) / cols;
  const std::size_t cell_h = h / rows;
  const std::size_t cell_w = w / cols;
  if (cell_h < 5 || cell_w < 5) {
    throw ConfigError("scene: too many blobs for the image size (cells need >= 5x5 pixels)");
  }

  for (std::size_t i = 0; i < spec.blobs; ++i) {
    const std::size_t top = (i / cols) * cell_h;
    const std::size_t left = (i % cols) * cell_w;
    // Semi-axes leave at least one pixel of background on each side of the cell.
    const std::size_t max_ry = (cell_h - 3) / 2;
    const std::size_t max_rx = (cell_w - 3) / 2;
    const std::size_t ry = 1 + rng.below(max_ry);
    const std::size_t rx = 1 + rng.below(max_rx);
    const std::size_t cy = top + 1 + ry + rng.below(cell_h - 2 * ry - 2);
    const std::size_t cx = left + 1 + rx + rng.below(cell_w - 2 * rx - 2);

    std::vector<double> spectrum;
    for (;;) {
      spectrum = bump_spectrum(rng, nb);
      double diff = 0.0;
      for (std::size_t b = 0; b < nb; ++b) diff = std::max(diff, std::abs(spectrum[b] - background[b]));
      if (diff >= 0.05) break;
    }
    for (std::size_t r = cy - ry; r <= cy + ry; ++r) {
      for (std::size_t c = cx - rx; c <= cx + rx; ++c) {
        const double dy = (static_cast<double>(r) - static_cast<double>(cy)) / static_cast<double>(ry);
        const double dx = (static_cast<double>(c) - static_cast<double>(cx)) / static_cast<double>(rx);
        if (dx * dx + dy * dy <= 1.0) {
          for (std::size_t b = 0; b < nb; ++b) cube.at(b, r, c) = spectrum[b];
        }
      }
    }
  }
  return cube;
}

SpectralCube gradients_scene(const SceneSpec& spec, Rng& rng) {
  const std::size_t h = spec.height;
  const std::size_t w = spec.width;
  const std::size_t nb = spec.bands;
  // Two random coefficient sets blended along the band axis.
  struct Coeffs {
    double wu, wv, ws, fu, fv, phase;
  };
  auto draw = [&rng] {
    return Coeffs{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0),
                  rng.uniform(0.3, 1.5), rng.uniform(0.3, 1.5),
                  rng.uniform(0.0, 2.0 * std::numbers::pi)};
  };
  const Coeffs a = draw();
  const Coeffs z = draw();
  SpectralCube cube(h, w, nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double t = nb > 1 ? static_cast<double>(b) / static_cast<double>(nb - 1) : 0.0;
    auto mix = [t](double p, double q) { return (1.0 - t) * p + t * q; };
    const double wu = mix(a.wu, z.wu), wv = mix(a.wv, z.wv), ws = mix(a.ws, z.ws);
    const double fu = mix(a.fu, z.fu), fv = mix(a.fv, z.fv), ph = mix(a.phase, z.phase);
    const double total = wu + wv + ws;
    for (std::size_t r = 0; r < h; ++r) {
      const double u = h > 1 ? static_cast<double>(r) / static_cast<double>(h - 1) : 0.0;
      for (std::size_t c = 0; c < w; ++c) {
        const double v = w > 1 ? static_cast<double>(c) / static_cast<double>(w - 1) : 0.0;
        const double wave = 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * (fu * u + fv * v) + ph));
        cube.at(b, r, c) = 0.1 + 0.8 * (wu * u + wv * v + ws * wave) / total;
      }
    }
  }
  return cube;
}

SpectralCube checkerboard_scene(const SceneSpec& spec, Rng& rng) {
  const std::size_t h = spec.height;
  const std::size_t w = spec.width;
  const std::size_t nb = spec.bands;
  const std::size_t cell = spec.cell > 0 ? spec.cell : std::max<std::size_t>(2, std::min(h, w) / 8);
  const std::size_t cells_y = (h + cell - 1) / cell;
  const std::size_t cells_x = (w + cell - 1) / cell;
  std::vector<double> brightness(cells_y * cells_x);
  for (double& v : brightness) v = rng.uniform(0.5, 1.0);

  SpectralCube cube(h, w, nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double t = nb > 1 ? static_cast<double>(b) / static_cast<double>(nb - 1) : 0.5;
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t cy = r / cell;
        const std::size_t cx = c / cell;
        const double ramp = (cy + cx) % 2 == 0 ? t : 1.0 - t;
        cube.at(b, r, c) = brightness[cy * cells_x + cx] * (0.1 + 0.8 * ramp);
      }
    }
  }
  return cube;
}

SceneGenerator parse_generator(const std::string& name) {
  if (name == "blobs") return SceneGenerator::blobs;
  if (name == "gradients") return SceneGenerator::gradients;
  if (name == "checkerboard") return SceneGenerator::checkerboard;
  throw ConfigError("scene: unknown generator \"" + name + "\"");
}

}  // namespace

void SceneSpec::validate() const {
  if (height == 0 || width == 0 || bands == 0) {
    throw ConfigError("scene: height, width and bands must be positive");
  }
}

std::string_view generator_name(SceneGenerator g) noexcept {
  switch (g) {
    case SceneGenerator::blobs:
      return "blobs";
    case SceneGenerator::gradients:
      return "gradients";
    case SceneGenerator::checkerboard:
      return "checkerboard";
  }
  return "blobs";
}

SceneSpec parse_scene_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "scene spec: invalid JSON at byte offset " << e.byte << ": " << e.what();
    throw ParseError(msg.str());
  }
  SceneSpec spec;
  try {
    spec.height = j.at("height").get<std::size_t>();
    spec.width = j.at("width").get<std::size_t>();
    spec.bands = j.at("bands").get<std::size_t>();
    spec.generator = parse_generator(j.value("generator", std::string("blobs")));
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.blobs = j.value("blobs", std::size_t{6});
    spec.cell = j.value("cell", std::size_t{0});
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene_spec(buf.str());
}

std::string scene_spec_to_json(const SceneSpec& spec) {
  json j{{"height", spec.height},
         {"width", spec.width},
         {"bands", spec.bands},
         {"generator", std::string(generator_name(spec.generator))},
         {"seed", spec.seed},
         {"blobs", spec.blobs},
         {"cell", spec.cell}};
  return j.dump(2);
}

SpectralCube generate_scene(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.generator) {
    case SceneGenerator::blobs:
      return blobs_scene(spec, rng);
    case SceneGenerator::gradients:
      return gradients_scene(spec, rng);
    case SceneGenerator::checkerboard:
      return checkerboard_scene(spec, rng);
  }
  throw ConfigError("scene: unknown generator");
}

}  // namespace cidcassi
