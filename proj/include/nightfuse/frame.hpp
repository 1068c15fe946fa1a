// frame.hpp : 8-bit image buffers used throughout the pipeline
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nightfuse {

// Single-channel 8-bit image, row-major.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height bytes

  GrayFrame() = default;
  GrayFrame(int w, int h, std::uint8_t fill = 0)
      : width(w),
        height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  std::uint8_t at(int x, int y) const { return data[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return data[index(x, y)]; }
  std::size_t pixel_count() const { return data.size(); }
  bool same_size(const GrayFrame& other) const {
    return width == other.width && height == other.height;
  }

  bool operator==(const GrayFrame&) const = default;
};

// Interleaved 8-bit RGB image, row-major.
struct RgbFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height bytes

  RgbFrame() = default;
  RgbFrame(int w, int h, std::uint8_t fill = 0)
      : width(w),
        height(h),
        data(3u * static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t index(int x, int y) const {
    return 3u * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(x));
  }
  std::uint8_t at(int x, int y, int channel) const { return data[index(x, y) + channel]; }
  std::uint8_t& at(int x, int y, int channel) { return data[index(x, y) + channel]; }
  std::size_t pixel_count() const { return data.size() / 3; }
  bool same_size(const RgbFrame& other) const {
    return width == other.width && height == other.height;
  }

  bool operator==(const RgbFrame&) const = default;
};

}  // namespace nightfuse
