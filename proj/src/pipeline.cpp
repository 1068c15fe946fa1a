// pipeline.cpp : configuration layering, sidecar and report io, the run loop
#include "nightfuse/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "nightfuse/errors.hpp"
#include "nightfuse/frame_io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace nightfuse {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Adds the elapsed wall time to a stage bucket when it goes out of scope.
class StageTimer {
 public:
  explicit StageTimer(double& bucket) : bucket_(bucket), t0_(Clock::now()) {}
  ~StageTimer() { bucket_ += seconds_since(t0_); }

 private:
  double& bucket_;
  Clock::time_point t0_;
};

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string frame_file_name(const char* stem, std::size_t index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.%s", stem, index, ext);
  return buf;
}

// Rethrows frame_io failures with the frame index attached, keeping the
// concrete exception type so callers can still tell what went wrong.
template <typename Fn>
auto with_frame_index(std::size_t index, Fn&& fn) -> decltype(fn()) {
  auto prefix = [index](const Error& e) {
    return "frame " + std::to_string(index) + ": " + e.what();
  };
  try {
    return fn();
  } catch (const FileNotFound& e) {
    throw FileNotFound(prefix(e));
  } catch (const MalformedImage& e) {
    throw MalformedImage(prefix(e));
  } catch (const ColorInGrayStream& e) {
    throw ColorInGrayStream(prefix(e));
  } catch (const DimensionMismatch& e) {
    throw DimensionMismatch(prefix(e));
  } catch (const IoError& e) {
    throw IoError(prefix(e));
  }
}

// Splits [begin, end) into contiguous chunks, one worker thread per chunk.
// The first failure wins and is rethrown after all workers join.
void parallel_for(std::size_t begin, std::size_t end, int threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t count = end - begin;
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex error_mutex;
  std::exception_ptr error;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + count * w / workers;
    const std::size_t hi = begin + count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

const char* polarity_name(Polarity polarity) {
  return polarity == Polarity::Positive ? "positive" : "absolute";
}

const char* class_name(RegionClass c) {
  return c == RegionClass::Object ? "object" : "noise";
}

RegionClass class_from_name(const std::string& name, const fs::path& path) {
  if (name == "object") return RegionClass::Object;
  if (name == "noise") return RegionClass::Noise;
  throw ParseError(path.string() + ": unknown classification '" + name + "'");
}

RegionSummary summarize(const Region& region) {
  return {region.bbox_x, region.bbox_y, region.bbox_w, region.bbox_h, region.area,
          region.classification};
}

}  // namespace

ConfigOverlay parse_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("config file " + path.string() + ": root must be an object");

  ConfigOverlay overlay;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "ir_dir") overlay.ir_dir = value.get<std::string>();
      else if (key == "vis_dir") overlay.vis_dir = value.get<std::string>();
      else if (key == "out_dir") overlay.out_dir = value.get<std::string>();
      else if (key == "stride") overlay.stride = value.get<int>();
      else if (key == "median_kernel") overlay.median_kernel = value.get<int>();
      else if (key == "threshold") overlay.threshold = value.get<int>();
      else if (key == "area_min") overlay.area_min = value.get<int>();
      else if (key == "ratio_min") overlay.ratio_min = value.get<double>();
      else if (key == "ratio_max") overlay.ratio_max = value.get<double>();
      else if (key == "connectivity") overlay.connectivity = value.get<int>();
      else if (key == "morph_open_radius") overlay.morph_open_radius = value.get<int>();
      else if (key == "polarity") overlay.polarity = value.get<std::string>();
      else if (key == "boost") overlay.boost = value.get<int>();
      else if (key == "box_color") {
        const auto rgb = value.get<std::vector<int>>();
        if (rgb.size() != 3) throw ParseError("config key 'box_color': expected three values");
        overlay.box_color = std::array<int, 3>{rgb[0], rgb[1], rgb[2]};
      } else if (key == "box_thickness") overlay.box_thickness = value.get<int>();
      else if (key == "draw_boxes") overlay.draw_boxes = value.get<bool>();
      else if (key == "background_frames") {
        if (value.is_string()) {
          if (value.get<std::string>() != "all")
            throw ParseError("config key 'background_frames': expected a count or \"all\"");
          overlay.background_frames = 0;
        } else {
          const auto n = value.get<std::int64_t>();
          if (n < 1)
            throw ValidationError("background_frames must be >= 1 or \"all\"");
          overlay.background_frames = static_cast<std::uint64_t>(n);
        }
      } else if (key == "emit_masks") overlay.emit_masks = value.get<bool>();
      else if (key == "emit_background") overlay.emit_background = value.get<bool>();
      else if (key == "frame_rate_hint") overlay.frame_rate_hint = value.get<double>();
      else if (key == "threads") overlay.threads = value.get<int>();
      else throw ParseError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config key '" + key + "': " + e.what());
    }
  }
  return overlay;
}

PipelineConfig resolve_config(const ConfigOverlay& file_values,
                              const ConfigOverlay& flag_values) {
  PipelineConfig config;
  std::optional<int> stride;

  auto apply = [&](const ConfigOverlay& o) {
    if (o.ir_dir) config.ir_dir = *o.ir_dir;
    if (o.vis_dir) config.vis_dir = *o.vis_dir;
    if (o.out_dir) config.out_dir = *o.out_dir;
    if (o.stride) stride = *o.stride;
    if (o.median_kernel) config.sampling.median_kernel = *o.median_kernel;
    if (o.threshold) config.detection.diff_threshold = *o.threshold;
    if (o.area_min) config.detection.area_min = *o.area_min;
    if (o.ratio_min) config.detection.ratio_min = *o.ratio_min;
    if (o.ratio_max) config.detection.ratio_max = *o.ratio_max;
    if (o.connectivity) config.detection.connectivity = *o.connectivity;
    if (o.morph_open_radius) config.detection.morph_open_radius = *o.morph_open_radius;
    if (o.polarity) {
      if (*o.polarity == "positive") config.detection.polarity = Polarity::Positive;
      else if (*o.polarity == "absolute") config.detection.polarity = Polarity::Absolute;
      else throw ParseError("unknown polarity '" + *o.polarity +
                            "' (expected positive or absolute)");
    }
    if (o.boost) config.fusion.boost = *o.boost;
    if (o.box_color) {
      for (int c : *o.box_color)
        if (c < 0 || c > 255)
          throw ValidationError("box_color channels must be in [0, 255]");
      config.fusion.box_color = {static_cast<std::uint8_t>((*o.box_color)[0]),
                                 static_cast<std::uint8_t>((*o.box_color)[1]),
                                 static_cast<std::uint8_t>((*o.box_color)[2])};
    }
    if (o.box_thickness) config.fusion.box_thickness = *o.box_thickness;
    if (o.draw_boxes) config.fusion.draw_boxes = *o.draw_boxes;
    if (o.background_frames) config.background_frames = *o.background_frames;
    if (o.emit_masks) config.emit_masks = *o.emit_masks;
    if (o.emit_background) config.emit_background = *o.emit_background;
    if (o.frame_rate_hint) config.frame_rate_hint = *o.frame_rate_hint;
    if (o.threads) config.threads = *o.threads;
  };
  apply(file_values);
  apply(flag_values);

  if (stride)
    config.sampling.stride_frames = *stride;
  else if (config.frame_rate_hint > 0)
    config.sampling.stride_frames =
        std::max(1, static_cast<int>(std::lround(config.frame_rate_hint / 4.0)));

  validate_config(config);
  return config;
}

void validate_config(const PipelineConfig& config) {
  auto bad = [](const std::string& why) { throw ValidationError(why); };
  if (config.ir_dir.empty()) bad("ir_dir is required");
  if (config.vis_dir.empty()) bad("vis_dir is required");
  if (config.out_dir.empty()) bad("out_dir is required");
  if (config.sampling.stride_frames < 1) bad("stride must be >= 1");
  if (config.sampling.median_kernel < 1 || config.sampling.median_kernel % 2 == 0)
    bad("median_kernel must be odd and >= 1");
  if (config.detection.diff_threshold < 0 || config.detection.diff_threshold > 255)
    bad("threshold must be in [0, 255]");
  if (config.detection.area_min < 1) bad("area_min must be >= 1");
  if (config.detection.ratio_min <= 0) bad("ratio_min must be positive");
  if (config.detection.ratio_min > config.detection.ratio_max)
    bad("ratio_min must not exceed ratio_max");
  if (config.detection.connectivity != 4 && config.detection.connectivity != 8)
    bad("connectivity must be 4 or 8");
  if (config.detection.morph_open_radius < 0) bad("morph_open_radius must be >= 0");
  if (config.fusion.boost < 0 || config.fusion.boost > 255)
    bad("boost must be in [0, 255]");
  if (config.fusion.box_thickness < 1) bad("box_thickness must be >= 1");
  if (config.frame_rate_hint < 0) bad("frame_rate_hint must be >= 0");
  if (config.threads < 1) bad("threads must be >= 1");
}

ordered_json config_to_json(const PipelineConfig& config) {
  ordered_json j;
  j["ir_dir"] = config.ir_dir.string();
  j["vis_dir"] = config.vis_dir.string();
  j["out_dir"] = config.out_dir.string();
  j["stride"] = config.sampling.stride_frames;
  j["median_kernel"] = config.sampling.median_kernel;
  j["threshold"] = config.detection.diff_threshold;
  j["area_min"] = config.detection.area_min;
  j["ratio_min"] = config.detection.ratio_min;
  j["ratio_max"] = config.detection.ratio_max;
  j["connectivity"] = config.detection.connectivity;
  j["morph_open_radius"] = config.detection.morph_open_radius;
  j["polarity"] = polarity_name(config.detection.polarity);
  j["boost"] = config.fusion.boost;
  j["box_color"] = {config.fusion.box_color[0], config.fusion.box_color[1],
                    config.fusion.box_color[2]};
  j["box_thickness"] = config.fusion.box_thickness;
  j["draw_boxes"] = config.fusion.draw_boxes;
  if (config.background_frames == 0)
    j["background_frames"] = "all";
  else
    j["background_frames"] = config.background_frames;
  j["emit_masks"] = config.emit_masks;
  j["emit_background"] = config.emit_background;
  j["frame_rate_hint"] = config.frame_rate_hint;
  j["threads"] = config.threads;
  return j;
}

void emit_detections(const std::vector<DetectionRecord>& records,
                     const PipelineConfig& config, const fs::path& path) {
  const bool sorted =
      std::is_sorted(records.begin(), records.end(),
                     [](const DetectionRecord& a, const DetectionRecord& b) {
                       return a.frame_index < b.frame_index;
                     });
  if (!sorted) throw ValidationError("detection records must be sorted by frame_index");

  ordered_json doc;
  doc["config_echo"] = config_to_json(config);
  auto out_records = ordered_json::array();
  for (const DetectionRecord& record : records) {
    auto regions = ordered_json::array();
    for (const RegionSummary& r : record.regions) {
      regions.push_back({{"bbox_x", r.bbox_x},
                         {"bbox_y", r.bbox_y},
                         {"bbox_w", r.bbox_w},
                         {"bbox_h", r.bbox_h},
                         {"area", r.area},
                         {"classification", class_name(r.classification)}});
    }
    out_records.push_back(
        {{"frame_index", record.frame_index}, {"regions", std::move(regions)}});
  }
  doc["records"] = std::move(out_records);
  write_text_file(path, doc.dump(2) + "\n");
}

DetectionsDoc read_detections(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  DetectionsDoc result;
  try {
    result.config_echo = doc.at("config_echo");
    for (const auto& record : doc.at("records")) {
      DetectionRecord r;
      r.frame_index = record.at("frame_index").get<std::size_t>();
      for (const auto& region : record.at("regions")) {
        RegionSummary s;
        s.bbox_x = region.at("bbox_x").get<int>();
        s.bbox_y = region.at("bbox_y").get<int>();
        s.bbox_w = region.at("bbox_w").get<int>();
        s.bbox_h = region.at("bbox_h").get<int>();
        s.area = region.at("area").get<int>();
        s.classification = class_from_name(region.at("classification").get<std::string>(), path);
        r.regions.push_back(s);
      }
      result.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return result;
}

ordered_json report_to_json(const RunReport& report) {
  ordered_json j;
  j["frames_processed"] = report.frames_processed;
  j["wall_time_per_stage"] = {{"background", report.stage_seconds.background},
                              {"detect", report.stage_seconds.detect},
                              {"fuse", report.stage_seconds.fuse},
                              {"io", report.stage_seconds.io}};
  j["total_seconds"] = report.total_seconds;
  j["achieved_fps"] = report.achieved_fps;
  j["compute_fps"] = report.compute_fps;
  j["config_echo"] = config_to_json(report.config);
  return j;
}

RunReport run_pipeline(const PipelineConfig& config) {
  validate_config(config);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + config.out_dir.string() + ": " +
                  ec.message());
  const fs::path marker = config.out_dir / kIncompleteMarkerName;
  write_text_file(marker, "run in progress; removed on success\n");

  RunReport report;
  report.config = config;
  StageSeconds& stage = report.stage_seconds;
  const auto t_start = Clock::now();

  SequenceManifest manifest;
  {
    StageTimer t(stage.io);
    manifest = scan_sequences(config.ir_dir, config.vis_dir, config.frame_rate_hint);
  }
  const std::size_t frame_count = manifest.frame_count;
  const std::size_t bg_frames =
      config.background_frames == 0
          ? frame_count
          : static_cast<std::size_t>(
                std::min<std::uint64_t>(config.background_frames, frame_count));

  BackgroundModel model(manifest.width, manifest.height);
  for (std::size_t i = 0; i < bg_frames;
       i += static_cast<std::size_t>(config.sampling.stride_frames)) {
    GrayFrame frame;
    {
      StageTimer t(stage.io);
      frame = with_frame_index(i, [&] { return load_gray_frame(manifest.ir_paths[i]); });
    }
    StageTimer t(stage.background);
    if (config.sampling.median_kernel != 1)
      frame = spatial_median(frame, config.sampling.median_kernel);
    model.accumulate(frame);
  }
  GrayFrame background;
  {
    StageTimer t(stage.background);
    background = model.estimate();
  }
  if (config.emit_background) {
    StageTimer t(stage.io);
    save_frame(background, config.out_dir / "background.pgm");
  }

  std::vector<DetectionRecord> records;
  records.reserve(frame_count);
  const std::size_t batch = static_cast<std::size_t>(std::max(config.threads, 1)) * 8;
  std::vector<GrayFrame> ir_frames;
  std::vector<RgbFrame> vis_frames;
  std::vector<Detection> detections;
  std::vector<RgbFrame> fused;
  for (std::size_t base = 0; base < frame_count; base += batch) {
    const std::size_t end = std::min(frame_count, base + batch);
    const std::size_t n = end - base;
    ir_frames.assign(n, {});
    vis_frames.assign(n, {});
    detections.assign(n, {});
    fused.assign(n, {});
    {
      StageTimer t(stage.io);
      for (std::size_t k = 0; k < n; ++k) {
        ir_frames[k] = with_frame_index(
            base + k, [&] { return load_gray_frame(manifest.ir_paths[base + k]); });
        vis_frames[k] = with_frame_index(
            base + k, [&] { return load_rgb_frame(manifest.vis_paths[base + k]); });
      }
    }
    {
      StageTimer t(stage.detect);
      parallel_for(0, n, config.threads, [&](std::size_t k) {
        detections[k] = detect(ir_frames[k], background, config.detection);
      });
    }
    {
      StageTimer t(stage.fuse);
      parallel_for(0, n, config.threads, [&](std::size_t k) {
        fused[k] = compose_fused_frame(vis_frames[k], detections[k].regions, config.fusion);
      });
    }
    {
      StageTimer t(stage.io);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t index = base + k;
        with_frame_index(index, [&] {
          save_frame(fused[k], config.out_dir / frame_file_name("fused", index, "ppm"));
        });
        if (config.emit_masks)
          with_frame_index(index, [&] {
            save_frame(to_gray(detections[k].mask),
                       config.out_dir / frame_file_name("mask", index, "pgm"));
          });
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      DetectionRecord record;
      record.frame_index = base + k;
      record.regions.reserve(detections[k].regions.size());
      for (const Region& region : detections[k].regions)
        record.regions.push_back(summarize(region));
      records.push_back(std::move(record));
    }
  }
  {
    StageTimer t(stage.io);
    emit_detections(records, config, config.out_dir / "detections.json");
  }

  report.frames_processed = frame_count;
  report.total_seconds = seconds_since(t_start);
  report.achieved_fps =
      report.total_seconds > 0 ? static_cast<double>(frame_count) / report.total_seconds : 0.0;
  const double compute_seconds = stage.detect + stage.fuse;
  report.compute_fps =
      compute_seconds > 0 ? static_cast<double>(frame_count) / compute_seconds : 0.0;
  write_text_file(config.out_dir / "report.json", report_to_json(report).dump(2) + "\n");
  fs::remove(marker);
  return report;
}

}  // namespace nightfuse
