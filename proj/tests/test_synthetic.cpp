// test_synthetic.cpp : deterministic scene generator guarantees
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "json.hpp"

#include "nightfuse/background_model.hpp"
#include "nightfuse/errors.hpp"
#include "nightfuse/frame_io.hpp"
#include "nightfuse/synthetic.hpp"

#include "test_util.hpp"

using namespace nightfuse;

namespace {

bool inside_box(int x, int y, const BoxTruth& b, int pad = 0) {
  return x >= b.x - pad && x < b.x + b.w + pad && y >= b.y - pad && y < b.y + b.h + pad;
}

SceneSpec small_spec() {
  SceneSpec spec;
  spec.width = 64;
  spec.height = 48;
  spec.frames = 20;
  spec.seed = 5;
  return spec;
}

}  // namespace

TEST_CASE("the same seed reproduces the scene bit for bit") {
  const SceneSpec spec = small_spec();
  const Scene a = make_scene(spec);
  const Scene b = make_scene(spec);
  CHECK(a.background == b.background);
  REQUIRE(a.ir.size() == b.ir.size());
  REQUIRE(a.vis.size() == b.vis.size());
  for (std::size_t i = 0; i < a.ir.size(); ++i) {
    CHECK(a.ir[i] == b.ir[i]);
    CHECK(a.vis[i] == b.vis[i]);
  }
  CHECK(a.truth == b.truth);

  SceneSpec other = spec;
  other.seed = 6;
  const Scene c = make_scene(other);
  CHECK(a.background != c.background);
}

TEST_CASE("a clean scene is background plus one warm block") {
  const SceneSpec spec = small_spec();
  const Scene scene = make_scene(spec);
  REQUIRE(scene.truth.size() == spec.frames);
  CHECK(!scene.bar.has_value());

  for (std::size_t i = 0; i < spec.frames; ++i) {
    const BoxTruth& box = scene.truth[i];
    CHECK(box.w == spec.block_w);
    CHECK(box.h == spec.block_h);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        const int expected = inside_box(x, y, box)
                                 ? scene.background.at(x, y) + spec.warm_delta
                                 : scene.background.at(x, y);
        CHECK(scene.ir[i].at(x, y) == expected);
      }
  }
}

TEST_CASE("truth boxes respect the margins and the reserved bar strip") {
  for (std::uint32_t seed : {1u, 2u, 9u, 14u}) {
    SceneSpec spec = small_spec();
    spec.seed = seed;
    spec.frames = 12;
    const Scene scene = make_scene(spec);
    for (const BoxTruth& box : scene.truth) {
      CHECK(box.x >= 4);
      CHECK(box.y >= 4);
      CHECK(box.x + box.w <= spec.width - 4);
      CHECK(box.y + box.h <= spec.height - 10);  // bar strip stays clear even when unused
    }
  }
}

TEST_CASE("the block never dominates any pixel's history") {
  SceneSpec spec;
  spec.width = 60;
  spec.height = 40;
  spec.frames = 30;
  spec.seed = 7;
  const Scene scene = make_scene(spec);
  std::vector<int> occupancy(static_cast<std::size_t>(spec.width) * spec.height, 0);
  for (const BoxTruth& box : scene.truth)
    for (int y = box.y; y < box.y + box.h; ++y)
      for (int x = box.x; x < box.x + box.w; ++x)
        ++occupancy[static_cast<std::size_t>(y) * spec.width + x];
  for (int count : occupancy) CHECK(count < static_cast<int>(spec.frames) / 2);
}

TEST_CASE("temporal mode over the clean stream recovers the background exactly") {
  for (auto background : {SceneSpec::Background::Gradient, SceneSpec::Background::Textured}) {
    SceneSpec spec = small_spec();
    spec.background = background;
    spec.frames = 24;
    const Scene scene = make_scene(spec);
    BackgroundModel model(spec.width, spec.height);
    for (const GrayFrame& frame : scene.ir) model.accumulate(frame);
    CHECK(model.estimate() == scene.background);
  }
}

TEST_CASE("noisy variant adds a bar and isolated specks without moving the block") {
  SceneSpec clean = small_spec();
  clean.frames = 16;
  SceneSpec noisy = clean;
  noisy.speck_count = 8;
  noisy.warm_bar = true;

  const Scene a = make_scene(clean);
  const Scene b = make_scene(noisy);

  SUBCASE("trajectory and visible stream are unchanged") {
    CHECK(a.truth == b.truth);
    CHECK(a.background == b.background);
    for (std::size_t i = 0; i < a.vis.size(); ++i) CHECK(a.vis[i] == b.vis[i]);
  }

  SUBCASE("the bar sits where advertised") {
    REQUIRE(b.bar.has_value());
    const BoxTruth bar = *b.bar;
    CHECK(bar.w == 20);
    CHECK(bar.h == 4);
    CHECK(bar.x == (clean.width - 20) / 2);
    CHECK(bar.y == clean.height - 8);
    for (int y = bar.y; y < bar.y + bar.h; ++y)
      for (int x = bar.x; x < bar.x + bar.w; ++x)
        CHECK(b.ir[0].at(x, y) == b.background.at(x, y) + clean.warm_delta);
  }

  SUBCASE("specks are counted, isolated, and clear of the block and bar") {
    REQUIRE(b.bar.has_value());
    struct Pt {
      int x, y;
    };
    for (std::size_t i = 0; i < b.ir.size(); ++i) {
      std::vector<Pt> specks;
      for (int y = 0; y < clean.height; ++y)
        for (int x = 0; x < clean.width; ++x) {
          if (b.ir[i].at(x, y) == b.background.at(x, y)) continue;
          if (inside_box(x, y, b.truth[i]) || inside_box(x, y, *b.bar)) continue;
          specks.push_back({x, y});
        }
      CHECK(specks.size() == noisy.speck_count);
      for (std::size_t s = 0; s < specks.size(); ++s) {
        CHECK(!inside_box(specks[s].x, specks[s].y, b.truth[i], 2));
        CHECK(!inside_box(specks[s].x, specks[s].y, *b.bar, 2));
        for (std::size_t t = s + 1; t < specks.size(); ++t) {
          const int dx = std::abs(specks[s].x - specks[t].x);
          const int dy = std::abs(specks[s].y - specks[t].y);
          CHECK(std::max(dx, dy) >= 3);
        }
      }
    }
  }
}

TEST_CASE("frames carry a distinct visible tag") {
  const Scene scene = make_scene(small_spec());
  for (std::size_t i = 1; i < scene.vis.size(); ++i) CHECK(scene.vis[i] != scene.vis[0]);
}

TEST_CASE("write_scene and save_truth round-trip through the filesystem") {
  SceneSpec spec = small_spec();
  spec.frames = 5;
  const Scene scene = make_scene(spec);

  testutil::TempDir dir("scene");
  const auto ir_dir = dir.path / "ir";
  const auto vis_dir = dir.path / "vis";
  write_scene(scene, ir_dir, vis_dir);

  const SequenceManifest manifest = scan_sequences(ir_dir, vis_dir);
  REQUIRE(manifest.frame_count == 5);
  CHECK(manifest.width == spec.width);
  CHECK(manifest.height == spec.height);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(load_gray_frame(manifest.ir_paths[i]) == scene.ir[i]);
    CHECK(load_rgb_frame(manifest.vis_paths[i]) == scene.vis[i]);
  }

  const auto truth_path = dir.path / "truth.json";
  save_truth(scene, truth_path);
  std::ifstream in(truth_path);
  REQUIRE(in.good());
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc.at("frames").get<std::size_t>() == 5);
  CHECK(doc.at("width").get<int>() == spec.width);
  CHECK(doc.at("height").get<int>() == spec.height);
  REQUIRE(doc.at("boxes").size() == 5);
  CHECK(doc.at("boxes")[2].at("x").get<int>() == scene.truth[2].x);
  CHECK(doc.at("boxes")[2].at("frame").get<std::size_t>() == 2);
}

TEST_CASE("scene validation rejects impossible requests") {
  SceneSpec spec = small_spec();
  spec.frames = 0;
  CHECK_THROWS_AS(make_scene(spec), ValidationError);

  spec = small_spec();
  spec.width = 16;  // narrower than the bar strip allows
  CHECK_THROWS_AS(make_scene(spec), ValidationError);

  spec = small_spec();
  spec.height = 20;
  CHECK_THROWS_AS(make_scene(spec), ValidationError);

  spec = small_spec();
  spec.warm_delta = 0;
  CHECK_THROWS_AS(make_scene(spec), ValidationError);
  spec.warm_delta = 201;
  CHECK_THROWS_AS(make_scene(spec), ValidationError);

  spec = small_spec();
  spec.block_speed = 0;
  CHECK_THROWS_AS(make_scene(spec), ValidationError);

  spec = small_spec();
  spec.width = 22;
  spec.height = 28;
  spec.speck_count = 500;  // cannot satisfy the spacing rules
  CHECK_THROWS_AS(make_scene(spec), ValidationError);
}
