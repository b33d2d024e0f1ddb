// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "cidcassi/decomposition.hpp"
#include "cidcassi/error.hpp"
#include "cidcassi/scene.hpp"
#include "support/oracles.hpp"

namespace {

using namespace cidcassi;

SceneSpec spec_of(SceneGenerator g, std::size_t h, std::size_t w, std::size_t n,
                  std::uint64_t seed, std::size_t blobs = 6) {
  SceneSpec s;
  s.height = h;
  s.width = w;
  s.bands = n;
  s.generator = g;
  s.seed = seed;
  s.blobs = blobs;
  return s;
}

class AllGenerators : public ::testing::TestWithParam<SceneGenerator> {};

TEST_P(AllGenerators, DeterministicBoundedPositive) {
  const auto spec = spec_of(GetParam(), 40, 56, 7, 9);
  const auto a = generate_scene(spec);
  EXPECT_EQ(a, generate_scene(spec));
  EXPECT_EQ(a.height(), 40u);
  EXPECT_EQ(a.width(), 56u);
  EXPECT_EQ(a.bands(), 7u);
  for (double v : a.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (double v : band_mean(a).values()) EXPECT_GT(v, 0.0);
  auto other = spec;
  other.seed = 10;
  EXPECT_NE(a, generate_scene(other));
}

INSTANTIATE_TEST_SUITE_P(Scenes, AllGenerators,
                         ::testing::Values(SceneGenerator::blobs, SceneGenerator::gradients,
                                           SceneGenerator::checkerboard));

TEST(Blobs, GradientIsSparse) {
  const auto x = generate_scene(spec_of(SceneGenerator::blobs, 64, 64, 8, 3));
  std::size_t nonzero = 0;
  for (std::size_t b = 0; b < 8; ++b)
    for (std::size_t r = 0; r + 1 < 64; ++r)
      for (std::size_t c = 0; c + 1 < 64; ++c)
        if (x.at(b, r, c + 1) != x.at(b, r, c) || x.at(b, r + 1, c) != x.at(b, r, c)) ++nonzero;
  EXPECT_LT(static_cast<double>(nonzero) / (8.0 * 63 * 63), 0.15);
}

std::size_t blob_components(const SpectralCube& x) {
  std::vector<bool> fg(x.plane_size());
  for (std::size_t r = 0; r < x.height(); ++r) {
    for (std::size_t c = 0; c < x.width(); ++c) {
      bool differs = false;
      for (std::size_t b = 0; b < x.bands(); ++b) differs |= x.at(b, r, c) != x.at(b, 0, 0);
      fg[r * x.width() + c] = differs;
    }
  }
  return oracle::count_components(fg, x.height(), x.width());
}

TEST(Blobs, ComponentCountMatchesSpec) {
  for (std::size_t blobs : {1, 3, 6, 9, 12}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto x = generate_scene(spec_of(SceneGenerator::blobs, 64, 48, 5, seed, blobs));
      EXPECT_EQ(blob_components(x), blobs) << "blobs=" << blobs << " seed=" << seed;
    }
  }
}

TEST(Blobs, TooManyForTheImage) {
  EXPECT_THROW(generate_scene(spec_of(SceneGenerator::blobs, 8, 8, 3, 1, 16)), ConfigError);
}

TEST(Spec, JsonRoundTrip) {
  const auto s = spec_of(SceneGenerator::checkerboard, 12, 20, 4, 77, 3);
  const auto back = parse_scene_spec(scene_spec_to_json(s));
  EXPECT_EQ(back.height, 12u);
  EXPECT_EQ(back.width, 20u);
  EXPECT_EQ(back.bands, 4u);
  EXPECT_EQ(back.generator, SceneGenerator::checkerboard);
  EXPECT_EQ(back.seed, 77u);
}

TEST(Spec, Errors) {
  EXPECT_THROW(parse_scene_spec("{not json"), ParseError);
  EXPECT_THROW(parse_scene_spec(R"({"height": 4, "width": 4})"), ParseError);
  EXPECT_THROW(parse_scene_spec(R"({"height": 4, "width": 4, "bands": 2, "generator": "noise"})"),
               ConfigError);
  EXPECT_THROW(parse_scene_spec(R"({"height": 0, "width": 4, "bands": 2})"), ConfigError);
}

}  // namespace
