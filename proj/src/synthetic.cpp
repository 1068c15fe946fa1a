// synthetic.cpp : seeded scene generator for tests and demos
#include "nightfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

#include "nightfuse/errors.hpp"
#include "nightfuse/frame_io.hpp"

namespace fs = std::filesystem;

namespace nightfuse {
namespace {

constexpr int kMargin = 4;
constexpr int kBarW = 20;
constexpr int kBarH = 4;
constexpr int kBarGap = 2;  // clearance kept between the block band and the bar

// Deterministic across platforms: mt19937 output is fully specified, and the
// modulo mapping avoids std distributions, which are not.
std::uint32_t pick(std::mt19937& rng, std::uint32_t bound) {
  return bound == 0 ? 0 : rng() % bound;
}

int triangle_wave(long long t, long long range) {
  if (range <= 0) return 0;
  const long long period = 2 * range;
  long long m = t % period;
  if (m < 0) m += period;
  return static_cast<int>(m <= range ? m : period - m);
}

void check_spec(const SceneSpec& spec) {
  auto bad = [](const std::string& why) { throw ValidationError("scene spec: " + why); };
  if (spec.frames < 1) bad("frames must be >= 1");
  if (spec.block_w < 1 || spec.block_h < 1) bad("block dimensions must be positive");
  if (spec.block_speed < 1) bad("block_speed must be >= 1");
  if (spec.warm_delta < 1 || spec.warm_delta > 200) bad("warm_delta must be in [1, 200]");
  if (spec.speck_count < 0) bad("speck_count must be >= 0");
  if (spec.width < 2 * kMargin + spec.block_w) bad("frame too narrow for the block");
  if (spec.height < 2 * kMargin + spec.block_h + kBarH + kBarGap)
    bad("frame too short for the block band");
  // unconditional so a clean scene always has a constructible noisy twin
  if (spec.width < kBarW + 2) bad("frame too narrow for the bar strip");
}

bool inside_expanded(int x, int y, const BoxTruth& box, int pad) {
  return x >= box.x - pad && x < box.x + box.w + pad && y >= box.y - pad &&
         y < box.y + box.h + pad;
}

void stamp(GrayFrame& frame, const BoxTruth& box, int delta) {
  for (int y = box.y; y < box.y + box.h; ++y)
    for (int x = box.x; x < box.x + box.w; ++x) {
      const int v = frame.at(x, y) + delta;
      frame.at(x, y) = static_cast<std::uint8_t>(v > 255 ? 255 : v);
    }
}

}  // namespace

Scene make_scene(const SceneSpec& spec) {
  check_spec(spec);
  std::mt19937 rng(spec.seed);
  Scene scene;

  GrayFrame background(spec.width, spec.height);
  if (spec.background == SceneSpec::Background::Gradient) {
    const int lo = 16 + static_cast<int>(pick(rng, 17));
    int hi = 118 + static_cast<int>(pick(rng, 27));
    hi = std::min(hi, 250 - spec.warm_delta);
    if (hi <= lo) throw ValidationError("scene spec: warm_delta too large for a gradient");
    const double den = (spec.width - 1) + (spec.height - 1);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        background.at(x, y) =
            static_cast<std::uint8_t>(lo + std::lround((hi - lo) * (x + y) / den));
  } else {
    const int span = std::clamp(241 - spec.warm_delta, 1, 131);
    for (std::uint8_t& v : background.data)
      v = static_cast<std::uint8_t>(10 + pick(rng, static_cast<std::uint32_t>(span)));
  }
  scene.background = background;

  // The block row always keeps the bar strip clear so that enabling the bar
  // or specks never shifts the trajectory drawn for a given seed.
  const int y_max = spec.height - kMargin - kBarH - kBarGap - spec.block_h;
  const int block_y =
      kMargin + static_cast<int>(pick(rng, static_cast<std::uint32_t>(y_max - kMargin + 1)));
  const int x_min = kMargin;
  const int x_max = spec.width - kMargin - spec.block_w;

  BoxTruth bar{(spec.width - kBarW) / 2, spec.height - kMargin - kBarH, kBarW, kBarH};
  if (spec.warm_bar) scene.bar = bar;

  RgbFrame vis_base(spec.width, spec.height);
  for (std::uint8_t& v : vis_base.data) v = static_cast<std::uint8_t>(20 + pick(rng, 200));

  scene.ir.reserve(static_cast<std::size_t>(spec.frames));
  scene.vis.reserve(static_cast<std::size_t>(spec.frames));
  scene.truth.reserve(static_cast<std::size_t>(spec.frames));
  for (int i = 0; i < spec.frames; ++i) {
    const BoxTruth block{
        x_min + triangle_wave(static_cast<long long>(spec.block_speed) * i, x_max - x_min),
        block_y, spec.block_w, spec.block_h};

    GrayFrame ir = background;
    stamp(ir, block, spec.warm_delta);
    if (spec.warm_bar) stamp(ir, bar, spec.warm_delta);

    if (spec.speck_count > 0) {
      std::mt19937 speck_rng(spec.seed * 2654435761u + static_cast<std::uint32_t>(i) + 1u);
      struct Spot { int x, y; };
      std::vector<Spot> placed;
      int attempts = 0;
      while (static_cast<int>(placed.size()) < spec.speck_count && attempts < 20000) {
        ++attempts;
        const int sx = static_cast<int>(pick(speck_rng, static_cast<std::uint32_t>(spec.width)));
        const int sy = static_cast<int>(pick(speck_rng, static_cast<std::uint32_t>(spec.height)));
        bool clear = !inside_expanded(sx, sy, block, 2) &&
                     !(spec.warm_bar && inside_expanded(sx, sy, bar, 2));
        for (const auto& p : placed) {
          if (!clear) break;
          if (std::max(std::abs(p.x - sx), std::abs(p.y - sy)) < 3) clear = false;
        }
        if (!clear) continue;
        placed.push_back({sx, sy});
        const int v = ir.at(sx, sy) + spec.warm_delta;
        ir.at(sx, sy) = static_cast<std::uint8_t>(v > 255 ? 255 : v);
      }
      if (static_cast<int>(placed.size()) < spec.speck_count)
        throw ValidationError("scene spec: frame too small to place " +
                              std::to_string(spec.speck_count) + " isolated specks");
    }

    // Frame index tag in the visible stream keeps frames distinguishable; it
    // sits on row 0, which the block band never reaches.
    RgbFrame vis = vis_base;
    for (int b = 0; b < 4 && b < spec.width; ++b) {
      const auto byte =
          static_cast<std::uint8_t>((static_cast<std::uint32_t>(i) >> (8 * b)) & 0xFF);
      vis.at(b, 0, 0) = byte;
      vis.at(b, 0, 1) = byte;
      vis.at(b, 0, 2) = byte;
    }

    scene.truth.push_back(block);
    scene.ir.push_back(std::move(ir));
    scene.vis.push_back(std::move(vis));
  }
  return scene;
}

void write_scene(const Scene& scene, const fs::path& ir_dir, const fs::path& vis_dir) {
  fs::create_directories(ir_dir);
  fs::create_directories(vis_dir);
  char name[32];
  for (std::size_t i = 0; i < scene.ir.size(); ++i) {
    std::snprintf(name, sizeof name, "f%06zu.pgm", i);
    save_frame(scene.ir[i], ir_dir / name);
    std::snprintf(name, sizeof name, "f%06zu.ppm", i);
    save_frame(scene.vis[i], vis_dir / name);
  }
}

void save_truth(const Scene& scene, const fs::path& path) {
  nlohmann::ordered_json doc;
  doc["frames"] = scene.ir.size();
  doc["width"] = scene.background.width;
  doc["height"] = scene.background.height;
  auto boxes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < scene.truth.size(); ++i) {
    const BoxTruth& b = scene.truth[i];
    boxes.push_back({{"frame", i}, {"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
  }
  doc["boxes"] = std::move(boxes);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace nightfuse
