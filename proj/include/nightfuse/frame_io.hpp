// frame_io.hpp : image codecs and paired-sequence scanning
#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "nightfuse/frame.hpp"

namespace nightfuse {

// Decoders sniff the container from the file's magic bytes, so any supported
// format may appear under any extension. Supported: binary PGM (P5), binary
// PPM (P6), and 8-bit PNG (grayscale and RGB; palette images are expanded,
// alpha is stripped, 16-bit files are rejected).

// Color input is rejected with ColorInGrayStream.
GrayFrame load_gray_frame(const std::filesystem::path& path);

// Gray input is replicated to R = G = B.
RgbFrame load_rgb_frame(const std::filesystem::path& path);

// Encoders pick the container from the extension: ".png" writes PNG, anything
// else writes binary PGM/PPM with the canonical "P5\n{w} {h}\n255\n" header.
void save_frame(const GrayFrame& frame, const std::filesystem::path& path);
void save_frame(const RgbFrame& frame, const std::filesystem::path& path);

// Reads only as much of the header as needed to learn (width, height).
std::pair<int, int> probe_dimensions(const std::filesystem::path& path);

struct SequenceManifest {
  std::vector<std::filesystem::path> ir_paths;
  std::vector<std::filesystem::path> vis_paths;
  double frame_rate_hint = 0.0;  // frames per second, 0 = unknown
  int width = 0;
  int height = 0;
  std::size_t frame_count = 0;
};

// Lists image files in each directory in lexicographic filename order and
// pairs the i-th IR frame with the i-th visible frame. Every frame in both
// directories must share one (width, height).
SequenceManifest scan_sequences(const std::filesystem::path& ir_dir,
                                const std::filesystem::path& vis_dir,
                                double frame_rate_hint = 0.0);

}  // namespace nightfuse
