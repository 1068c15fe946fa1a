// synthetic.hpp : deterministic seeded test scenes
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "nightfuse/frame.hpp"

namespace nightfuse {

struct SceneSpec {
  int width = 160;
  int height = 120;
  int frames = 40;
  std::uint32_t seed = 1;
  enum class Background { Gradient, Textured };
  Background background = Background::Gradient;
  int block_w = 6;       // warm block walking horizontally, bouncing at margins
  int block_h = 14;
  int block_speed = 2;   // pixels per frame
  int warm_delta = 80;   // added to IR values under the block, bar, and specks
  int speck_count = 0;   // isolated single warm pixels per frame
  bool warm_bar = false; // static 20x4 warm bar near the bottom edge
};

struct BoxTruth {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool operator==(const BoxTruth&) const = default;
};

struct Scene {
  GrayFrame background;            // clean IR background, ground truth
  std::vector<GrayFrame> ir;
  std::vector<RgbFrame> vis;
  std::vector<BoxTruth> truth;     // block bounding box per frame
  std::optional<BoxTruth> bar;     // set when the warm bar is enabled
};

// Same seed, same spec: bit-identical scene. The block row is chosen so the
// block never overlaps the bar strip, whether or not the bar is enabled, so
// one seed's clean and noise-injected variants share a trajectory.
Scene make_scene(const SceneSpec& spec);

// Writes ir/f%06d.pgm and vis/f%06d.ppm, creating the directories.
void write_scene(const Scene& scene, const std::filesystem::path& ir_dir,
                 const std::filesystem::path& vis_dir);

// JSON file with the per-frame block boxes.
void save_truth(const Scene& scene, const std::filesystem::path& path);

}  // namespace nightfuse
