// background_model.hpp : temporal-mode background estimation
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nightfuse/frame.hpp"

namespace nightfuse {

struct SamplingPolicy {
  int stride_frames = 1;  // accumulate every stride-th frame
  int median_kernel = 3;  // odd spatial median window edge; 1 disables
};

// Per-pixel occurrence histogram over the 8-bit value range. The estimated
// background is, per pixel, the value seen most often.
class BackgroundModel {
 public:
  BackgroundModel(int width, int height);

  void accumulate(const GrayFrame& frame);

  // Per-pixel mode; ties go to the smaller value. Leaves the model unchanged.
  GrayFrame estimate() const;

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint64_t frames_accumulated() const { return frames_accumulated_; }
  std::uint32_t count(int x, int y, int value) const;

 private:
  int width_;
  int height_;
  std::uint64_t frames_accumulated_ = 0;
  std::vector<std::uint32_t> counts_;  // 256 bins per pixel, contiguous
};

// kernel x kernel neighborhood median with edge replication; kernel 1 is the
// identity. kernel must be odd and no larger than either frame dimension.
GrayFrame spatial_median(const GrayFrame& frame, int kernel);

// Samples frames 0, stride, 2*stride, ..., median-filters each sample,
// accumulates them, and extracts the mode image. frame_at(i) must yield the
// i-th frame of the sequence.
GrayFrame build_background(std::size_t frame_count,
                           const std::function<GrayFrame(std::size_t)>& frame_at,
                           const SamplingPolicy& policy);

}  // namespace nightfuse
