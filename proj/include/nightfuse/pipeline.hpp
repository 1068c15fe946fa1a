// pipeline.hpp : end-to-end orchestration, configuration, and reporting
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nightfuse/background_model.hpp"
#include "nightfuse/detector.hpp"
#include "nightfuse/fusion.hpp"

namespace nightfuse {

struct PipelineConfig {
  std::filesystem::path ir_dir;
  std::filesystem::path vis_dir;
  std::filesystem::path out_dir;
  SamplingPolicy sampling;
  DetectionParams detection;
  FusionConfig fusion;
  std::uint64_t background_frames = 0;  // 0 = build from the whole sequence
  bool emit_masks = false;
  bool emit_background = false;
  double frame_rate_hint = 0.0;         // 0 = unknown
  int threads = 1;
};

// Values parsed from a config file or command-line flags; unset fields fall
// back to the layer below (flags over file over defaults).
struct ConfigOverlay {
  std::optional<std::string> ir_dir, vis_dir, out_dir;
  std::optional<int> stride, median_kernel, threshold, area_min, connectivity,
      morph_open_radius, boost, box_thickness, threads;
  std::optional<double> ratio_min, ratio_max, frame_rate_hint;
  std::optional<std::string> polarity;
  std::optional<std::uint64_t> background_frames;  // 0 = all
  std::optional<std::array<int, 3>> box_color;
  std::optional<bool> draw_boxes, emit_masks, emit_background;
};

// Strict keys and types; unknown keys are rejected so typos cannot silently
// fall back to defaults.
ConfigOverlay parse_config_file(const std::filesystem::path& path);

// Defaults, then file values, then flag values; the background sampling
// stride defaults to round(frame_rate_hint / 4) when a rate hint is known and
// to 1 otherwise. Validates the result.
PipelineConfig resolve_config(const ConfigOverlay& file_values,
                              const ConfigOverlay& flag_values);

void validate_config(const PipelineConfig& config);

nlohmann::ordered_json config_to_json(const PipelineConfig& config);

struct RegionSummary {
  int bbox_x = 0;
  int bbox_y = 0;
  int bbox_w = 0;
  int bbox_h = 0;
  int area = 0;
  RegionClass classification = RegionClass::Noise;
  bool operator==(const RegionSummary&) const = default;
};

struct DetectionRecord {
  std::size_t frame_index = 0;
  std::vector<RegionSummary> regions;  // label order
  bool operator==(const DetectionRecord&) const = default;
};

// Single JSON document with the config echo and one record per frame;
// records must arrive sorted by frame_index.
void emit_detections(const std::vector<DetectionRecord>& records,
                     const PipelineConfig& config, const std::filesystem::path& path);

struct DetectionsDoc {
  nlohmann::ordered_json config_echo;
  std::vector<DetectionRecord> records;
};
DetectionsDoc read_detections(const std::filesystem::path& path);

struct StageSeconds {
  double background = 0;
  double detect = 0;
  double fuse = 0;
  double io = 0;
};

struct RunReport {
  std::size_t frames_processed = 0;
  StageSeconds stage_seconds;
  double total_seconds = 0;
  double achieved_fps = 0;  // frames / total wall time
  double compute_fps = 0;   // frames / (detect + fuse wall time), io excluded
  PipelineConfig config;
};
nlohmann::ordered_json report_to_json(const RunReport& report);

// Marker dropped in out_dir while a run is in flight. It is removed on
// success, so a complete output directory never contains one.
inline constexpr const char* kIncompleteMarkerName = "INCOMPLETE";

// Scan, build the background, then per batch: load, detect (parallel), fuse
// (parallel), write in frame order. Writes fused_%06d.ppm, detections.json,
// report.json, and optionally mask_%06d.pgm and background.pgm into out_dir.
// Outputs are bit-identical for every thread count.
RunReport run_pipeline(const PipelineConfig& config);

}  // namespace nightfuse
