// fusion.cpp : object brightening and bounding-box overlay
#include "nightfuse/fusion.hpp"

#include <algorithm>
#include <string>

#include "nightfuse/errors.hpp"

namespace nightfuse {
namespace {

void check_config(const FusionConfig& config) {
  if (config.boost < 0 || config.boost > 255)
    throw ValidationError("boost must be in [0, 255], got " + std::to_string(config.boost));
  if (config.box_thickness < 1)
    throw ValidationError("box_thickness must be >= 1, got " +
                          std::to_string(config.box_thickness));
}

void boost_region(RgbFrame& frame, const Region& region, int boost) {
  for (const PixelCoord& p : region.pixels) {
    if (p.x < 0 || p.y < 0 || p.x >= frame.width || p.y >= frame.height)
      throw RegionOutOfBounds("region " + std::to_string(region.label) + " pixel (" +
                              std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") lies outside the " + std::to_string(frame.width) + "x" +
                              std::to_string(frame.height) + " frame");
    const std::size_t base = frame.index(p.x, p.y);
    for (int c = 0; c < 3; ++c) {
      const int v = frame.data[base + static_cast<std::size_t>(c)] + boost;
      frame.data[base + static_cast<std::size_t>(c)] =
          static_cast<std::uint8_t>(v > 255 ? 255 : v);
    }
  }
}

// Ring of box_thickness pixels just inside the bbox perimeter, clipped to the
// frame without complaint.
void draw_ring(RgbFrame& frame, const Region& region, const FusionConfig& config) {
  const int t = config.box_thickness;
  const int x0 = region.bbox_x;
  const int y0 = region.bbox_y;
  const int x1 = region.bbox_x + region.bbox_w - 1;
  const int y1 = region.bbox_y + region.bbox_h - 1;
  const int cx0 = std::max(x0, 0);
  const int cy0 = std::max(y0, 0);
  const int cx1 = std::min(x1, frame.width - 1);
  const int cy1 = std::min(y1, frame.height - 1);
  for (int y = cy0; y <= cy1; ++y) {
    for (int x = cx0; x <= cx1; ++x) {
      const bool ring = x - x0 < t || x1 - x < t || y - y0 < t || y1 - y < t;
      if (!ring) continue;
      const std::size_t base = frame.index(x, y);
      frame.data[base] = config.box_color[0];
      frame.data[base + 1] = config.box_color[1];
      frame.data[base + 2] = config.box_color[2];
    }
  }
}

}  // namespace

RgbFrame boost_object_pixels(const RgbFrame& visible, const std::vector<Region>& regions,
                             const FusionConfig& config) {
  check_config(config);
  RgbFrame out = visible;
  for (const Region& region : regions)
    if (region.classification == RegionClass::Object)
      boost_region(out, region, config.boost);
  return out;
}

RgbFrame draw_bbox(const RgbFrame& frame, const Region& region, const FusionConfig& config) {
  check_config(config);
  RgbFrame out = frame;
  draw_ring(out, region, config);
  return out;
}

RgbFrame compose_fused_frame(const RgbFrame& visible, const std::vector<Region>& regions,
                             const FusionConfig& config) {
  RgbFrame out = boost_object_pixels(visible, regions, config);
  if (config.draw_boxes)
    for (const Region& region : regions)
      if (region.classification == RegionClass::Object) draw_ring(out, region, config);
  return out;
}

}  // namespace nightfuse
