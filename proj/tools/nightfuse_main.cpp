// nightfuse_main.cpp : command-line front end
#include <array>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nightfuse/errors.hpp"
#include "nightfuse/pipeline.hpp"
#include "nightfuse/synthetic.hpp"

namespace {

void print_report(const nightfuse::RunReport& report) {
  std::printf("frames processed : %zu\n", report.frames_processed);
  std::printf("background stage : %.3f s\n", report.stage_seconds.background);
  std::printf("detect stage     : %.3f s\n", report.stage_seconds.detect);
  std::printf("fuse stage       : %.3f s\n", report.stage_seconds.fuse);
  std::printf("io stage         : %.3f s\n", report.stage_seconds.io);
  std::printf("total            : %.3f s\n", report.total_seconds);
  std::printf("achieved fps     : %.2f\n", report.achieved_fps);
  std::printf("compute fps      : %.2f (detect + fuse only)\n", report.compute_fps);
  std::printf("outputs          : %s\n", report.config.out_dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nightfuse: fuses pre-aligned infrared and visible frame sequences,"
               " highlighting warm moving objects in the visible stream"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Detect objects against an estimated IR background "
                                        "and write fused visible frames");
  std::string ir_dir, vis_dir, out_dir, config_file, polarity, background_frames;
  int stride = 0, median_kernel = 0, threshold = 0, area_min = 0, connectivity = 0;
  int morph_open_radius = 0, boost = 0, box_thickness = 0, threads = 0;
  double ratio_min = 0, ratio_max = 0, fps_hint = 0;
  std::vector<int> box_color;
  bool emit_masks = false, emit_background = false, no_boxes = false;

  run->add_option("--ir-dir", ir_dir, "Directory of IR frames")->required();
  run->add_option("--vis-dir", vis_dir, "Directory of visible frames")->required();
  run->add_option("--out-dir", out_dir, "Output directory")->required();
  auto* o_config = run->add_option("--config", config_file, "JSON config file; flags override it");
  auto* o_stride = run->add_option("--stride", stride,
                                   "Background sampling stride in frames (default: "
                                   "round(fps-hint / 4) when --fps-hint is given, else 1)");
  auto* o_kernel = run->add_option("--median-kernel", median_kernel,
                                   "Spatial median window edge, odd; 1 disables (default 3)");
  auto* o_threshold = run->add_option("--threshold", threshold,
                                      "Background difference threshold (default 30)");
  auto* o_area = run->add_option("--area-min", area_min, "Minimum object area (default 50)");
  auto* o_rmin = run->add_option("--ratio-min", ratio_min,
                                 "Minimum bbox height/width ratio (default 1.5)");
  auto* o_rmax = run->add_option("--ratio-max", ratio_max,
                                 "Maximum bbox height/width ratio (default 4.0)");
  auto* o_boost = run->add_option("--boost", boost,
                                  "Brightness added to object pixels (default 60)");
  auto* o_conn = run->add_option("--connectivity", connectivity,
                                 "Component connectivity, 4 or 8 (default 8)");
  auto* o_radius = run->add_option("--morph-open-radius", morph_open_radius,
                                   "Opening radius; 0 disables (default 1)");
  auto* o_polarity = run->add_option("--polarity", polarity,
                                     "Difference polarity: positive or absolute");
  auto* o_bgframes = run->add_option("--background-frames", background_frames,
                                     "Frames used for the background: a count or \"all\"");
  auto* o_fps = run->add_option("--fps-hint", fps_hint, "Source frame rate, if known");
  auto* o_threads = run->add_option("--threads", threads,
                                    "Worker threads for detect and fuse (default 1)");
  auto* o_thick = run->add_option("--box-thickness", box_thickness,
                                  "Bounding box ring thickness (default 1)");
  auto* o_color = run->add_option("--box-color", box_color, "Bounding box color as R G B")
                      ->expected(3);
  auto* o_noboxes = run->add_flag("--no-boxes", no_boxes, "Skip bounding box rings");
  run->add_flag("--emit-masks", emit_masks, "Also write post-morphology masks");
  run->add_flag("--emit-background", emit_background, "Also write the estimated background");

  run->callback([&]() {
    nightfuse::ConfigOverlay file_values;
    if (o_config->count()) file_values = nightfuse::parse_config_file(config_file);

    nightfuse::ConfigOverlay flags;
    flags.ir_dir = ir_dir;
    flags.vis_dir = vis_dir;
    flags.out_dir = out_dir;
    if (o_stride->count()) flags.stride = stride;
    if (o_kernel->count()) flags.median_kernel = median_kernel;
    if (o_threshold->count()) flags.threshold = threshold;
    if (o_area->count()) flags.area_min = area_min;
    if (o_rmin->count()) flags.ratio_min = ratio_min;
    if (o_rmax->count()) flags.ratio_max = ratio_max;
    if (o_boost->count()) flags.boost = boost;
    if (o_conn->count()) flags.connectivity = connectivity;
    if (o_radius->count()) flags.morph_open_radius = morph_open_radius;
    if (o_polarity->count()) flags.polarity = polarity;
    if (o_bgframes->count()) {
      if (background_frames == "all") {
        flags.background_frames = 0;
      } else {
        try {
          const long long n = std::stoll(background_frames);
          if (n < 1) throw nightfuse::ValidationError("--background-frames must be >= 1 or \"all\"");
          flags.background_frames = static_cast<std::uint64_t>(n);
        } catch (const std::logic_error&) {
          throw nightfuse::ParseError("--background-frames expects a count or \"all\", got '" +
                                      background_frames + "'");
        }
      }
    }
    if (o_fps->count()) flags.frame_rate_hint = fps_hint;
    if (o_threads->count()) flags.threads = threads;
    if (o_thick->count()) flags.box_thickness = box_thickness;
    if (o_color->count())
      flags.box_color = std::array<int, 3>{box_color[0], box_color[1], box_color[2]};
    if (o_noboxes->count()) flags.draw_boxes = false;
    if (emit_masks) flags.emit_masks = true;
    if (emit_background) flags.emit_background = true;

    const nightfuse::PipelineConfig config = nightfuse::resolve_config(file_values, flags);
    const nightfuse::RunReport report = nightfuse::run_pipeline(config);
    print_report(report);
  });

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic",
                                 "Write a deterministic seeded test scene (same seed, "
                                 "bit-identical output)");
  std::string out_ir, out_vis, truth_file, background = "gradient";
  nightfuse::SceneSpec spec;
  bool bar = false;
  gen->add_option("--out-ir", out_ir, "Directory for IR frames")->required();
  gen->add_option("--out-vis", out_vis, "Directory for visible frames")->required();
  gen->add_option("--frames", spec.frames, "Frame count (default 40)");
  gen->add_option("--width", spec.width, "Frame width (default 160)");
  gen->add_option("--height", spec.height, "Frame height (default 120)");
  gen->add_option("--seed", spec.seed, "Scene seed (default 1)");
  gen->add_option("--background", background, "Background style: gradient or textured")
      ->check(CLI::IsMember({"gradient", "textured"}));
  gen->add_option("--block-w", spec.block_w, "Walking block width (default 6)");
  gen->add_option("--block-h", spec.block_h, "Walking block height (default 14)");
  gen->add_option("--speed", spec.block_speed, "Block speed in pixels per frame (default 2)");
  gen->add_option("--warm-delta", spec.warm_delta, "IR brightness added to warm areas (default 80)");
  gen->add_option("--specks", spec.speck_count, "Isolated warm speck pixels per frame (default 0)");
  gen->add_flag("--bar", bar, "Add a static warm 20x4 bar near the bottom edge");
  auto* o_truth = gen->add_option("--truth", truth_file, "Also write the block trajectory as JSON");

  gen->callback([&]() {
    spec.background = background == "textured" ? nightfuse::SceneSpec::Background::Textured
                                               : nightfuse::SceneSpec::Background::Gradient;
    spec.warm_bar = bar;
    const nightfuse::Scene scene = nightfuse::make_scene(spec);
    nightfuse::write_scene(scene, out_ir, out_vis);
    if (o_truth->count()) nightfuse::save_truth(scene, truth_file);
    std::printf("wrote %zu IR frames to %s and %zu visible frames to %s\n", scene.ir.size(),
                out_ir.c_str(), scene.vis.size(), out_vis.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const nightfuse::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nightfuse::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
