// fusion.hpp : visible-stream highlighting of detected objects
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nightfuse/detector.hpp"
#include "nightfuse/frame.hpp"

namespace nightfuse {

struct FusionConfig {
  int boost = 60;                               // added to every channel, saturating at 255
  std::array<std::uint8_t, 3> box_color{0, 255, 0};
  int box_thickness = 1;
  bool draw_boxes = true;
};

// Saturating additive brightening of every member pixel of every Object
// region; Noise regions and untouched pixels pass through unchanged.
RgbFrame boost_object_pixels(const RgbFrame& visible, const std::vector<Region>& regions,
                             const FusionConfig& config);

// Rectangular ring just inside the region's bounding box perimeter,
// box_thickness pixels thick, silently clipped to the frame.
RgbFrame draw_bbox(const RgbFrame& frame, const Region& region, const FusionConfig& config);

// Boost first, then (if enabled) one box per Object region in label order.
RgbFrame compose_fused_frame(const RgbFrame& visible, const std::vector<Region>& regions,
                             const FusionConfig& config);

}  // namespace nightfuse
