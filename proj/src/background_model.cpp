// background_model.cpp : per-pixel occurrence histograms and the mode image
#include "nightfuse/background_model.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "nightfuse/errors.hpp"

namespace nightfuse {

BackgroundModel::BackgroundModel(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw ValidationError("background model dimensions must be positive");
  counts_.assign(static_cast<std::size_t>(width) * height * 256, 0);
}

void BackgroundModel::accumulate(const GrayFrame& frame) {
  if (frame.width != width_ || frame.height != height_)
    throw DimensionMismatch("frame " + std::to_string(frame.width) + "x" +
                            std::to_string(frame.height) + " does not match model " +
                            std::to_string(width_) + "x" + std::to_string(height_));
  const std::uint8_t* px = frame.data.data();
  std::uint32_t* counts = counts_.data();
  const std::size_t n = frame.data.size();
  for (std::size_t i = 0; i < n; ++i) ++counts[(i << 8) | px[i]];
  ++frames_accumulated_;
}

GrayFrame BackgroundModel::estimate() const {
  if (frames_accumulated_ == 0)
    throw EmptyModel("cannot estimate a background from zero accumulated frames");
  GrayFrame background(width_, height_);
  const std::uint32_t* counts = counts_.data();
  for (std::size_t i = 0; i < background.data.size(); ++i) {
    const std::uint32_t* bins = counts + (i << 8);
    int best = 0;
    std::uint32_t best_count = bins[0];
    for (int v = 1; v < 256; ++v) {
      if (bins[v] > best_count) {  // strict, so ties keep the smaller value
        best_count = bins[v];
        best = v;
      }
    }
    background.data[i] = static_cast<std::uint8_t>(best);
  }
  return background;
}

std::uint32_t BackgroundModel::count(int x, int y, int value) const {
  return counts_[(static_cast<std::size_t>(y) * width_ + x) * 256 +
                 static_cast<std::size_t>(value)];
}

GrayFrame spatial_median(const GrayFrame& frame, int kernel) {
  if (kernel < 1 || kernel % 2 == 0)
    throw BadKernel("median kernel must be odd and >= 1, got " + std::to_string(kernel));
  if (kernel > frame.width || kernel > frame.height)
    throw BadKernel("median kernel " + std::to_string(kernel) + " exceeds frame " +
                    std::to_string(frame.width) + "x" + std::to_string(frame.height));
  if (kernel == 1) return frame;
  const int r = kernel / 2;
  GrayFrame out(frame.width, frame.height);
  std::vector<std::uint8_t> window(static_cast<std::size_t>(kernel) * kernel);
  const std::size_t mid = window.size() / 2;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      std::size_t k = 0;
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = std::clamp(y + dy, 0, frame.height - 1);
        for (int dx = -r; dx <= r; ++dx) {
          const int xx = std::clamp(x + dx, 0, frame.width - 1);
          window[k++] = frame.at(xx, yy);
        }
      }
      std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid),
                       window.end());
      out.at(x, y) = window[mid];
    }
  }
  return out;
}

GrayFrame build_background(std::size_t frame_count,
                           const std::function<GrayFrame(std::size_t)>& frame_at,
                           const SamplingPolicy& policy) {
  if (frame_count == 0) throw EmptySource("frame source is empty");
  if (policy.stride_frames < 1)
    throw ValidationError("stride_frames must be >= 1, got " +
                          std::to_string(policy.stride_frames));
  std::optional<BackgroundModel> model;
  for (std::size_t i = 0; i < frame_count; i += static_cast<std::size_t>(policy.stride_frames)) {
    GrayFrame frame = frame_at(i);
    if (policy.median_kernel != 1) frame = spatial_median(frame, policy.median_kernel);
    if (!model) model.emplace(frame.width, frame.height);
    model->accumulate(frame);
  }
  return model->estimate();
}

}  // namespace nightfuse
