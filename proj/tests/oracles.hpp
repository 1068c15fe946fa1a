// oracles.hpp : independent reference implementations the tests check against.
// Each oracle takes a deliberately different route from the library: full-sort
// medians, map-based tallies, recursive flood fill against union-find
// labeling, set algebra against separable morphology sweeps.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "nightfuse/detector.hpp"
#include "nightfuse/frame.hpp"

namespace oracle {

using Pixel = std::pair<int, int>;  // (x, y)
using PixelSet = std::set<Pixel>;

// Replicated-border window, fully sorted, middle element taken.
inline std::uint8_t median_at(const nightfuse::GrayFrame& frame, int x, int y, int kernel) {
  const int r = kernel / 2;
  std::vector<std::uint8_t> window;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const int xx = std::clamp(x + dx, 0, frame.width - 1);
      const int yy = std::clamp(y + dy, 0, frame.height - 1);
      window.push_back(frame.at(xx, yy));
    }
  std::sort(window.begin(), window.end());
  return window[window.size() / 2];
}

inline nightfuse::GrayFrame spatial_median(const nightfuse::GrayFrame& frame, int kernel) {
  nightfuse::GrayFrame out(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) out.at(x, y) = median_at(frame, x, y, kernel);
  return out;
}

// Exhaustive per-pixel value tally.
inline std::vector<std::map<int, int>> tally(const std::vector<nightfuse::GrayFrame>& frames) {
  std::vector<std::map<int, int>> counts(frames.front().pixel_count());
  for (const auto& frame : frames)
    for (std::size_t i = 0; i < frame.data.size(); ++i) ++counts[i][frame.data[i]];
  return counts;
}

// Mode per pixel; smallest value wins ties. Maps iterate in key order, so the
// first strictly-greater count seen belongs to the smallest winning value.
inline nightfuse::GrayFrame mode_background(const std::vector<nightfuse::GrayFrame>& frames) {
  const auto counts = tally(frames);
  nightfuse::GrayFrame out(frames.front().width, frames.front().height);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    int best_value = 0;
    int best_count = 0;
    for (const auto& [value, count] : counts[i]) {
      if (count > best_count) {
        best_count = count;
        best_value = value;
      }
    }
    out.data[i] = static_cast<std::uint8_t>(best_value);
  }
  return out;
}

inline nightfuse::BinaryMask threshold_mask(const nightfuse::GrayFrame& frame,
                                            const nightfuse::GrayFrame& background,
                                            int threshold, nightfuse::Polarity polarity) {
  nightfuse::BinaryMask mask(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y)
    for (int x = 0; x < frame.width; ++x) {
      int diff = frame.at(x, y) - background.at(x, y);
      if (polarity == nightfuse::Polarity::Absolute && diff < 0) diff = -diff;
      mask.at(x, y) = diff > threshold ? 255 : 0;
    }
  return mask;
}

inline PixelSet foreground_set(const nightfuse::BinaryMask& mask) {
  PixelSet set;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.fg(x, y)) set.insert({x, y});
  return set;
}

inline nightfuse::BinaryMask mask_from_set(const PixelSet& set, int width, int height) {
  nightfuse::BinaryMask mask(width, height);
  for (const auto& [x, y] : set) mask.at(x, y) = 255;
  return mask;
}

// Set-based erosion: a pixel survives iff the whole window lies in the set
// (off-frame positions are never in the set, matching the border convention).
inline PixelSet erode_set(const PixelSet& set, int radius) {
  PixelSet out;
  for (const auto& [x, y] : set) {
    bool keep = true;
    for (int dy = -radius; keep && dy <= radius; ++dy)
      for (int dx = -radius; keep && dx <= radius; ++dx)
        keep = set.count({x + dx, y + dy}) > 0;
    if (keep) out.insert({x, y});
  }
  return out;
}

// Set-based dilation, clipped to the frame.
inline PixelSet dilate_set(const PixelSet& set, int radius, int width, int height) {
  PixelSet out;
  for (const auto& [x, y] : set)
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx >= 0 && ny >= 0 && nx < width && ny < height) out.insert({nx, ny});
      }
  return out;
}

inline PixelSet open_set(const PixelSet& set, int radius, int width, int height) {
  return dilate_set(erode_set(set, radius), radius, width, height);
}

// Recursive flood fill (explicit stack), one set per component.
inline std::vector<PixelSet> flood_components(const nightfuse::BinaryMask& mask,
                                              int connectivity) {
  std::vector<PixelSet> components;
  std::set<Pixel> seen;
  for (int sy = 0; sy < mask.height; ++sy) {
    for (int sx = 0; sx < mask.width; ++sx) {
      if (!mask.fg(sx, sy) || seen.count({sx, sy})) continue;
      PixelSet component;
      std::vector<Pixel> stack{{sx, sy}};
      seen.insert({sx, sy});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        component.insert({x, y});
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
            if (!mask.fg(nx, ny) || seen.count({nx, ny})) continue;
            seen.insert({nx, ny});
            stack.push_back({nx, ny});
          }
      }
      components.push_back(std::move(component));
    }
  }
  return components;
}

struct BoxStats {
  int x, y, w, h, area;
};

inline BoxStats box_of(const PixelSet& component) {
  int min_x = component.begin()->first, max_x = min_x;
  int min_y = component.begin()->second, max_y = min_y;
  for (const auto& [x, y] : component) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1,
          static_cast<int>(component.size())};
}

inline bool is_object(int area, int bbox_w, int bbox_h,
                      const nightfuse::DetectionParams& params) {
  const double ratio = static_cast<double>(bbox_h) / static_cast<double>(bbox_w);
  return area >= params.area_min && ratio >= params.ratio_min && ratio <= params.ratio_max;
}

// Bounding-box ring as rectangle-minus-shrunken-rectangle, clipped.
inline PixelSet ring_set(int bx, int by, int bw, int bh, int thickness, int width, int height) {
  PixelSet outer;
  for (int y = by; y < by + bh; ++y)
    for (int x = bx; x < bx + bw; ++x)
      if (x >= 0 && y >= 0 && x < width && y < height) outer.insert({x, y});
  const int ix = bx + thickness;
  const int iy = by + thickness;
  const int iw = bw - 2 * thickness;
  const int ih = bh - 2 * thickness;
  if (iw > 0 && ih > 0)
    for (int y = iy; y < iy + ih; ++y)
      for (int x = ix; x < ix + iw; ++x) outer.erase({x, y});
  return outer;
}

// Saturating boost applied once per membership occurrence.
inline nightfuse::RgbFrame boosted(const nightfuse::RgbFrame& visible,
                                   const std::vector<nightfuse::Region>& regions, int boost) {
  nightfuse::RgbFrame out = visible;
  for (const auto& region : regions) {
    if (region.classification != nightfuse::RegionClass::Object) continue;
    for (const auto& p : region.pixels)
      for (int c = 0; c < 3; ++c) {
        const int v = out.at(p.x, p.y, c) + boost;
        out.at(p.x, p.y, c) = static_cast<std::uint8_t>(std::min(v, 255));
      }
  }
  return out;
}

}  // namespace oracle
