// detector.hpp : background subtraction, morphology, blob labeling, shape gating
#pragma once

#include <cstdint>
#include <vector>

#include "nightfuse/frame.hpp"

namespace nightfuse {

// Image restricted to {0, 255}; 255 marks foreground.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h, std::uint8_t fill = 0)
      : width(w),
        height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  bool fg(int x, int y) const { return data[index(x, y)] != 0; }
  std::uint8_t at(int x, int y) const { return data[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return data[index(x, y)]; }

  bool operator==(const BinaryMask&) const = default;
};

enum class Polarity { Positive, Absolute };
enum class RegionClass { Noise, Object };

struct PixelCoord {
  int x = 0;
  int y = 0;
  bool operator==(const PixelCoord&) const = default;
};

// A labeled connected foreground component.
struct Region {
  int label = 0;    // 1-based, in raster order of each region's first pixel
  int bbox_x = 0;   // minimal enclosing rectangle
  int bbox_y = 0;
  int bbox_w = 0;
  int bbox_h = 0;
  int area = 0;     // member pixel count
  std::vector<PixelCoord> pixels;  // members, raster order
  RegionClass classification = RegionClass::Noise;
};

struct DetectionParams {
  int diff_threshold = 30;    // strict ">" on the frame-minus-background difference
  int area_min = 50;          // inclusive
  double ratio_min = 1.5;     // inclusive bounds on bbox height/width
  double ratio_max = 4.0;
  int connectivity = 8;       // 4 or 8
  int morph_open_radius = 1;  // square structuring element edge 2r+1; 0 disables
  Polarity polarity = Polarity::Positive;
};

BinaryMask subtract_threshold(const GrayFrame& frame, const GrayFrame& background,
                              const DetectionParams& params);

// Erosion then dilation with a square structuring element. Off-frame pixels
// count as background, so foreground touching the border erodes away.
BinaryMask morph_open(const BinaryMask& mask, int radius);

std::vector<Region> label_components(const BinaryMask& mask, int connectivity);

// Object iff area >= area_min and ratio_min <= bbox_h/bbox_w <= ratio_max.
std::vector<Region> classify_regions(std::vector<Region> regions,
                                     const DetectionParams& params);

struct Detection {
  BinaryMask mask;  // post-morphology
  std::vector<Region> regions;
};

Detection detect(const GrayFrame& frame, const GrayFrame& background,
                 const DetectionParams& params);

GrayFrame to_gray(const BinaryMask& mask);

}  // namespace nightfuse
