// detector.cpp : subtraction, separable morphology, union-find labeling, gating
#include "nightfuse/detector.hpp"

#include <array>
#include <cstdlib>
#include <string>
#include <utility>

#include "nightfuse/errors.hpp"

namespace nightfuse {
namespace {

// One axis of a square-window sweep; a full erosion or dilation is the
// horizontal pass composed with the vertical pass. Erosion treats off-frame
// pixels as background, so a window that overhangs the border never passes;
// dilation only ever writes in-frame pixels.
BinaryMask sweep(const BinaryMask& in, int radius, bool horizontal, bool erode) {
  BinaryMask out(in.width, in.height);
  const int limit = horizontal ? in.width : in.height;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const int c = horizontal ? x : y;
      bool fg;
      if (erode) {
        fg = c - radius >= 0 && c + radius < limit;
        for (int d = -radius; fg && d <= radius; ++d)
          fg = horizontal ? in.fg(x + d, y) : in.fg(x, y + d);
      } else {
        fg = false;
        for (int d = -radius; !fg && d <= radius; ++d) {
          const int cc = c + d;
          if (cc < 0 || cc >= limit) continue;
          fg = horizontal ? in.fg(cc, y) : in.fg(x, cc);
        }
      }
      out.at(x, y) = fg ? 255 : 0;
    }
  }
  return out;
}

}  // namespace

BinaryMask subtract_threshold(const GrayFrame& frame, const GrayFrame& background,
                              const DetectionParams& params) {
  if (!frame.same_size(background))
    throw DimensionMismatch("frame " + std::to_string(frame.width) + "x" +
                            std::to_string(frame.height) + " does not match background " +
                            std::to_string(background.width) + "x" +
                            std::to_string(background.height));
  BinaryMask mask(frame.width, frame.height);
  const bool absolute = params.polarity == Polarity::Absolute;
  for (std::size_t i = 0; i < frame.data.size(); ++i) {
    int diff = static_cast<int>(frame.data[i]) - static_cast<int>(background.data[i]);
    if (absolute) diff = std::abs(diff);
    mask.data[i] = diff > params.diff_threshold ? 255 : 0;
  }
  return mask;
}

BinaryMask morph_open(const BinaryMask& mask, int radius) {
  if (radius < 0)
    throw ValidationError("morph_open_radius must be >= 0, got " + std::to_string(radius));
  if (radius == 0) return mask;
  BinaryMask eroded = sweep(sweep(mask, radius, true, true), radius, false, true);
  return sweep(sweep(eroded, radius, true, false), radius, false, false);
}

std::vector<Region> label_components(const BinaryMask& mask, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw ValidationError("connectivity must be 4 or 8, got " + std::to_string(connectivity));
  const int w = mask.width;
  const int h = mask.height;
  std::vector<std::int32_t> label(mask.data.size(), -1);
  std::vector<std::int32_t> parent;
  auto find = [&parent](std::int32_t a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  const bool diagonal = connectivity == 8;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.fg(x, y)) continue;
      std::array<std::int32_t, 4> near{};
      int near_count = 0;
      auto consider = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w) return;
        const std::int32_t l = label[mask.index(nx, ny)];
        if (l >= 0) near[static_cast<std::size_t>(near_count++)] = find(l);
      };
      consider(x - 1, y);
      consider(x, y - 1);
      if (diagonal) {
        consider(x - 1, y - 1);
        consider(x + 1, y - 1);
      }
      if (near_count == 0) {
        const auto id = static_cast<std::int32_t>(parent.size());
        parent.push_back(id);
        label[mask.index(x, y)] = id;
        continue;
      }
      std::int32_t root = near[0];
      for (int k = 1; k < near_count; ++k) root = std::min(root, near[static_cast<std::size_t>(k)]);
      label[mask.index(x, y)] = root;
      for (int k = 0; k < near_count; ++k) {
        const std::int32_t other = near[static_cast<std::size_t>(k)];
        if (other != root) parent[static_cast<std::size_t>(other)] = root;
      }
    }
  }

  // Second pass resolves roots and numbers regions 1..n in the raster order
  // of each region's first pixel; pixels land in raster order as a side effect.
  std::vector<std::int32_t> region_of(parent.size(), -1);
  std::vector<Region> regions;
  std::vector<int> max_x;
  std::vector<int> max_y;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t l = label[mask.index(x, y)];
      if (l < 0) continue;
      const std::int32_t root = find(l);
      std::int32_t ri = region_of[static_cast<std::size_t>(root)];
      if (ri < 0) {
        ri = static_cast<std::int32_t>(regions.size());
        region_of[static_cast<std::size_t>(root)] = ri;
        Region region;
        region.label = static_cast<int>(ri) + 1;
        region.bbox_x = x;
        region.bbox_y = y;
        regions.push_back(std::move(region));
        max_x.push_back(x);
        max_y.push_back(y);
      }
      Region& region = regions[static_cast<std::size_t>(ri)];
      region.bbox_x = std::min(region.bbox_x, x);
      region.bbox_y = std::min(region.bbox_y, y);
      max_x[static_cast<std::size_t>(ri)] = std::max(max_x[static_cast<std::size_t>(ri)], x);
      max_y[static_cast<std::size_t>(ri)] = std::max(max_y[static_cast<std::size_t>(ri)], y);
      region.pixels.push_back({x, y});
      ++region.area;
    }
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    regions[i].bbox_w = max_x[i] - regions[i].bbox_x + 1;
    regions[i].bbox_h = max_y[i] - regions[i].bbox_y + 1;
  }
  return regions;
}

std::vector<Region> classify_regions(std::vector<Region> regions,
                                     const DetectionParams& params) {
  for (Region& region : regions) {
    const double ratio =
        static_cast<double>(region.bbox_h) / static_cast<double>(region.bbox_w);
    const bool object = region.area >= params.area_min && ratio >= params.ratio_min &&
                        ratio <= params.ratio_max;
    region.classification = object ? RegionClass::Object : RegionClass::Noise;
  }
  return regions;
}

Detection detect(const GrayFrame& frame, const GrayFrame& background,
                 const DetectionParams& params) {
  BinaryMask mask =
      morph_open(subtract_threshold(frame, background, params), params.morph_open_radius);
  std::vector<Region> regions =
      classify_regions(label_components(mask, params.connectivity), params);
  return {std::move(mask), std::move(regions)};
}

GrayFrame to_gray(const BinaryMask& mask) {
  GrayFrame frame;
  frame.width = mask.width;
  frame.height = mask.height;
  frame.data = mask.data;
  return frame;
}

}  // namespace nightfuse
