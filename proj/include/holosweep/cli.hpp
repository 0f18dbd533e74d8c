#pragma once

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "holosweep/dataset.hpp"
#include "holosweep/depthest.hpp"
#include "holosweep/errors.hpp"
#include "holosweep/holo.hpp"
#include "holosweep/holo_io.hpp"
#include "holosweep/io.hpp"
#include "holosweep/metrics.hpp"
#include "holosweep/recon.hpp"
#include "holosweep/scene.hpp"
#include "holosweep/sweep.hpp"
#include "holosweep/viewgeom.hpp"

namespace holosweep::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

namespace detail {

struct OpticsArgs {
  std::string config_path;
  std::optional<std::uint32_t> seed;
  std::string phase;

  void attach(CLI::App* cmd) {
    cmd->add_option("--optics", config_path, "JSON config file (optics + sweep parameters)");
    cmd->add_option("--seed", seed, "initial-phase seed (overrides config)");
    cmd->add_option("--phase", phase, "initial phase mode: zero | random")
        ->check(CLI::IsMember({"zero", "random"}));
  }

  holo::OpticsConfig resolve() const {
    holo::OpticsConfig optics;
    if (!config_path.empty()) optics = holo::optics_from_json(io::read_json(config_path));
    if (seed) optics.phase_seed = *seed;
    if (!phase.empty()) optics.phase_mode = holo::parse_phase_mode(phase);
    return optics;
  }

  nlohmann::json sweep_section() const {
    if (config_path.empty()) return nlohmann::json::object();
    const auto j = io::read_json(config_path);
    return j.contains("sweep") ? j.at("sweep") : nlohmann::json::object();
  }
};

inline PixelRect parse_rect(const std::string& text) {
  PixelRect rect;
  if (std::sscanf(text.c_str(), "%d,%d,%d,%d", &rect.x0, &rect.y0, &rect.x1, &rect.y1) != 4)
    throw ConfigError("rectangle must be x0,y0,x1,y1 - got: " + text);
  return rect;
}

inline std::vector<double> parse_scan(const std::string& text) {
  double z0 = 0.0;
  double z1 = 0.0;
  int count = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &z0, &z1, &count) != 3 || count < 1)
    throw ConfigError("scan must be start:end:count - got: " + text);
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    distances.push_back(z0);
    return distances;
  }
  for (int i = 0; i < count; ++i)
    distances.push_back(z0 + (z1 - z0) * static_cast<double>(i) / (count - 1));
  return distances;
}

// ----------------------------------------------------------------- gen

struct GenArgs {
  std::string out;
  std::string scene = "torus";
  int views = 1024;
  int width = 640;
  int height = 360;
  double hfov = 60.0;
  double radius = viewgeom::kDefaultTrackRadiusM;
  double near_m = 0.11;
  double far_m = 0.287;
  unsigned threads = 0;
};

inline void run_gen(const GenArgs& a) {
  scenegen::SceneSpec spec = scenegen::SceneSpec::preset(scenegen::parse_shape(a.scene));
  scenegen::RenderOptions options{a.width, a.height, a.hfov};
  scenegen::DepthMapping mapping{a.near_m, a.far_m};
  const auto manifest =
      scenegen::generate_dataset(spec, a.views, a.out, options, mapping, a.radius, a.threads);
  std::cout << "wrote " << manifest.view_count << " views (" << manifest.width << "x"
            << manifest.height << ", step " << 360.0 / manifest.view_count << " deg) under "
            << scenegen::shape_root(a.out, manifest.shape).string() << "\n";
}

// ------------------------------------------------------------ estimate

struct EstimateArgs {
  std::string data;
  std::string scene = "torus";
  int n = 2;
  std::string baseline = "blend";
  std::string out;  // defaults to data root
  unsigned threads = 0;
};

inline void run_estimate(const EstimateArgs& a) {
  const auto manifest = scenegen::load_manifest(a.data, a.scene);
  const auto baseline = depthest::parse_baseline(a.baseline);
  const auto sched = viewgeom::schedule(a.n);
  if (manifest.view_count < (1 << (a.n + 1)))
    throw ConfigError("dataset has too few views for n=" + std::to_string(a.n));

  std::vector<depthest::TrainView> train;
  for (double angle : sched.train_angles_deg) {
    const int index = scenegen::view_index_for_angle(manifest, angle);
    train.push_back({angle, scenegen::load_view_depth(a.data, manifest, index)});
  }
  const auto state = depthest::fit_depths(std::move(train), a.n, baseline);

  const fs::path out_root = a.out.empty() ? fs::path(a.data) : fs::path(a.out);
  double mean_mse = 0.0;
  double mean_acc = 0.0;
  std::vector<double> mses(sched.test_angles_deg.size());
  std::vector<double> accs(sched.test_angles_deg.size());
  parallel_for(
      static_cast<int>(sched.test_angles_deg.size()),
      [&](int i) {
        const double angle = sched.test_angles_deg[static_cast<std::size_t>(i)];
        const int index = scenegen::view_index_for_angle(manifest, angle);
        const auto frame = scenegen::load_view(a.data, manifest, index);
        const ImageU8 est = depthest::estimate(state, frame.rgb, angle);
        const fs::path dir = out_root / manifest.shape / ("view_" + std::to_string(index));
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
        io::write_pgm(dir / "depth_est.pgm", est);
        io::write_json(dir / "est_meta.json",
                       {{"baseline", depthest::baseline_name(baseline)}, {"n", a.n}});
        mses[static_cast<std::size_t>(i)] = metrics::mse(est, frame.depth).normalized;
        accs[static_cast<std::size_t>(i)] = metrics::acc(est, frame.depth);
      },
      a.threads);
  for (std::size_t i = 0; i < mses.size(); ++i) {
    mean_mse += mses[i];
    mean_acc += accs[i];
  }
  mean_mse /= static_cast<double>(mses.size());
  mean_acc /= static_cast<double>(accs.size());
  std::cout << "estimated " << sched.test_angles_deg.size() << " views (n=" << a.n
            << ", baseline=" << a.baseline << ")  mean depth MSE=" << mean_mse
            << "  mean depth ACC=" << mean_acc << "\n";
}

// --------------------------------------------------------------- synth

struct SynthArgs {
  std::string data;
  std::string scene = "torus";
  int view = 0;
  std::string out;
  bool use_estimate = false;
  bool fourk = false;
  OpticsArgs optics;
};

inline void run_synth(const SynthArgs& a) {
  const auto manifest = scenegen::load_manifest(a.data, a.scene);
  if (a.view < 0 || a.view >= manifest.view_count)
    throw ConfigError("view index out of range");
  auto frame = scenegen::load_view(a.data, manifest, a.view);
  ImageU8 depth = frame.depth;
  if (a.use_estimate) {
    const fs::path est_path =
        scenegen::view_dir(a.data, manifest.shape, a.view) / "depth_est.pgm";
    depth = io::read_pgm(est_path);
    if (!depth.same_size(frame.rgb)) throw DataError("estimated depth resolution mismatch");
  }
  ImageRgb8 rgb = frame.rgb;
  if (a.fourk) {
    rgb = upscale_nearest(rgb, sweep::kFourKWidth, sweep::kFourKHeight);
    depth = upscale_nearest(depth, sweep::kFourKWidth, sweep::kFourKHeight);
  }
  const auto optics = a.optics.resolve();
  const auto fields = holo::synthesize(rgb, depth, optics);

  const fs::path out_dir = a.out.empty()
                               ? scenegen::view_dir(a.data, manifest.shape, a.view) / "cgh"
                               : fs::path(a.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  const std::array<const char*, 3> names{"field_r.hswf", "field_g.hswf", "field_b.hswf"};
  for (int c = 0; c < 3; ++c) io::write_field(out_dir / names[c], fields[c]);
  holo::write_lee(out_dir, holo::lee_encode_rgb(fields, optics));
  std::cout << "wrote CGH fields and Lee planes to " << out_dir.string() << "\n";
}

// --------------------------------------------------------------- recon

struct ReconArgs {
  std::string in;
  std::string out = "recon.png";
  std::optional<double> focus;
  std::string scan;       // start:end:count
  std::string scan_csv = "focus_scan.csv";
  std::string rect_front;
  std::string rect_back;
  std::string scene;      // optional: derive regions from scene geometry
  double angle = 45.0;
  double radius = viewgeom::kDefaultTrackRadiusM;
  double hfov = 60.0;
  double region_pad = 1.0;
  unsigned threads = 0;
};

inline void run_recon(const ReconArgs& a) {
  const holo::LeeHologram lee = holo::read_lee(a.in);

  std::vector<PixelRect> regions;
  if (!a.rect_front.empty()) regions.push_back(parse_rect(a.rect_front));
  if (!a.rect_back.empty()) regions.push_back(parse_rect(a.rect_back));
  if (regions.empty() && !a.scene.empty()) {
    const auto spec = scenegen::SceneSpec::preset(scenegen::parse_shape(a.scene));
    const auto pose = viewgeom::camera_pose(a.angle, a.radius);
    const scenegen::RenderOptions options{lee.width, lee.height, a.hfov};
    const double d0 = scenegen::object_center_depth(spec, pose, 0);
    const double d1 = scenegen::object_center_depth(spec, pose, 1);
    const std::size_t front = d0 <= d1 ? 0 : 1;
    const auto rects = scenegen::object_pixel_regions_disjoint(spec, pose, options, a.region_pad);
    regions.push_back(rects[front]);
    regions.push_back(rects[1 - front]);
  }

  if (!a.scan.empty()) {
    const auto distances = parse_scan(a.scan);
    const auto entries = recon::focus_scan(lee, distances, regions, a.threads);
    recon::write_focus_scan_csv(a.scan_csv, entries);
    std::cout << "wrote " << entries.size() << " scan rows to " << a.scan_csv << "\n";
    return;
  }
  if (!a.focus) throw ConfigError("recon needs --focus or --scan");
  const auto rec = recon::reconstruct(lee, *a.focus);
  recon::write_reconstruction_png(a.out, rec);
  std::cout << "wrote reconstruction at " << *a.focus << " m to " << a.out << "\n";
}

// ------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string est;
  std::string truth;
  std::string pred_lee;
  std::string truth_lee;
};

inline void run_metrics(const MetricsArgs& a) {
  if (!a.pred_lee.empty() || !a.truth_lee.empty()) {
    if (a.pred_lee.empty() || a.truth_lee.empty())
      throw ConfigError("CGH comparison needs both --pred-lee and --truth-lee");
    const double value = metrics::cgh_acc(holo::read_lee(a.pred_lee), holo::read_lee(a.truth_lee));
    std::cout << "cgh_acc " << value << "\n";
    return;
  }
  if (a.est.empty() || a.truth.empty())
    throw ConfigError("image comparison needs --est and --truth");
  const bool png = fs::path(a.est).extension() == ".png";
  if (png) {
    const auto ia = io::read_png_rgb8(a.est);
    const auto ib = io::read_png_rgb8(a.truth);
    std::cout << "acc " << metrics::acc(ia, ib) << "\n";
    return;
  }
  const auto ia = io::read_pgm(a.est);
  const auto ib = io::read_pgm(a.truth);
  const auto m = metrics::mse(ia, ib);
  std::cout << "mse_normalized " << m.normalized << "\n"
            << "mse_byte " << m.byte_scale << "\n"
            << "acc " << metrics::acc(ia, ib) << "\n";
}

// --------------------------------------------------------------- sweep

struct SweepArgs {
  std::string data;
  std::string scene = "torus";
  std::string out = "sweep_out";
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::optional<std::string> baseline;
  std::optional<double> threshold;
  bool fourk = false;
  unsigned threads = 0;
  OpticsArgs optics;
};

inline void run_sweep_cmd(const SweepArgs& a) {
  sweep::SweepConfig cfg;
  cfg.data_root = a.data;
  cfg.shape = a.scene;
  cfg.out_dir = a.out;
  cfg.optics = a.optics.resolve();
  cfg.fourk = a.fourk;
  cfg.threads = a.threads;

  const auto section = a.optics.sweep_section();
  cfg.n_min = section.value("n_min", cfg.n_min);
  cfg.n_max = section.value("n_max", cfg.n_max);
  if (section.contains("baseline"))
    cfg.baseline = depthest::parse_baseline(section.at("baseline").get<std::string>());
  cfg.knee_threshold = section.value("threshold", cfg.knee_threshold);

  if (a.n_min) cfg.n_min = *a.n_min;
  if (a.n_max) cfg.n_max = *a.n_max;
  if (a.baseline) cfg.baseline = depthest::parse_baseline(*a.baseline);
  if (a.threshold) cfg.knee_threshold = *a.threshold;

  const auto records = sweep::run_sweep(cfg);
  std::optional<sweep::KneeResult> knee;
  if (records.size() >= 2) {
    std::vector<std::pair<double, double>> series;
    for (const auto& r : records) series.emplace_back(r.central_angle_deg, r.depth_mse);
    bool positive = true;
    for (const auto& p : series) positive = positive && p.second > 0.0;
    if (positive) knee = sweep::detect_knee(series, cfg.knee_threshold);
  }
  std::cout << sweep::report_text(records, knee);
  std::cout << "report written to " << cfg.out_dir << "\n";
}

// ---------------------------------------------------------------- knee

struct KneeArgs {
  std::string csv;
  double threshold = 1.5;
};

inline void run_knee(const KneeArgs& a) {
  const auto records = sweep::read_sweep_csv(a.csv);
  std::vector<std::pair<double, double>> series;
  for (const auto& r : records) series.emplace_back(r.central_angle_deg, r.depth_mse);
  const auto knee = sweep::detect_knee(series, a.threshold);
  std::cout << "knee_angle_deg " << knee.knee_angle_deg << "\n";
  std::cout << "improvement_ratios";
  for (double ratio : knee.improvement_ratios) std::cout << " " << ratio;
  std::cout << "\n";
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{"holosweep: RGB-depth capture, hologram synthesis, and central-angle sweeps"};
  app.require_subcommand(1);

  detail::GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "render an RGB-depth turntable dataset");
  gen_cmd->add_option("--out", gen.out, "dataset root directory")->required();
  gen_cmd->add_option("--scene", gen.scene, "torus | cube | cone | sphere");
  gen_cmd->add_option("--views", gen.views, "view count (power of two, <= 1024)");
  gen_cmd->add_option("--width", gen.width, "image width");
  gen_cmd->add_option("--height", gen.height, "image height");
  gen_cmd->add_option("--hfov", gen.hfov, "horizontal field of view (deg)");
  gen_cmd->add_option("--radius", gen.radius, "camera track radius (m)");
  gen_cmd->add_option("--near", gen.near_m, "distance mapped to depth byte 255 (m)");
  gen_cmd->add_option("--far", gen.far_m, "distance mapped to depth byte 0 (m)");
  gen_cmd->add_option("--threads", gen.threads, "worker threads (0 = auto)");

  detail::EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "estimate depth at held-out viewpoints");
  est_cmd->add_option("--data", est.data, "dataset root")->required();
  est_cmd->add_option("--scene", est.scene, "scene shape");
  est_cmd->add_option("--n", est.n, "schedule level (2..9)")->required();
  est_cmd->add_option("--baseline", est.baseline, "nearest | blend");
  est_cmd->add_option("--out", est.out, "output root (default: dataset root)");
  est_cmd->add_option("--threads", est.threads, "worker threads (0 = auto)");

  detail::SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "synthesize a CGH for one view");
  synth_cmd->add_option("--data", synth.data, "dataset root")->required();
  synth_cmd->add_option("--scene", synth.scene, "scene shape");
  synth_cmd->add_option("--view", synth.view, "view index")->required();
  synth_cmd->add_option("--out", synth.out, "output directory (default: view dir /cgh)");
  synth_cmd->add_flag("--use-estimate", synth.use_estimate,
                      "synthesize from depth_est.pgm instead of ground truth");
  synth_cmd->add_flag("--fourk", synth.fourk, "upscale to 3840x2160 before synthesis");
  synth.optics.attach(synth_cmd);

  detail::ReconArgs rec;
  auto* rec_cmd = app.add_subcommand("recon", "reconstruct a CGH numerically");
  rec_cmd->add_option("--in", rec.in, "directory with Lee planes + lee_meta.json")->required();
  rec_cmd->add_option("--out", rec.out, "output PNG path");
  rec_cmd->add_option("--focus", rec.focus, "focus distance (m)");
  rec_cmd->add_option("--scan", rec.scan, "focus scan start:end:count (m)");
  rec_cmd->add_option("--scan-csv", rec.scan_csv, "focus scan CSV path");
  rec_cmd->add_option("--rect-front", rec.rect_front, "front region x0,y0,x1,y1");
  rec_cmd->add_option("--rect-back", rec.rect_back, "back region x0,y0,x1,y1");
  rec_cmd->add_option("--scene", rec.scene, "derive regions from this scene preset");
  rec_cmd->add_option("--angle", rec.angle, "view angle for region projection (deg)");
  rec_cmd->add_option("--radius", rec.radius, "camera radius for region projection (m)");
  rec_cmd->add_option("--hfov", rec.hfov, "horizontal fov for region projection (deg)");
  rec_cmd->add_option("--region-pad", rec.region_pad, "bounding-box padding factor for regions");
  rec_cmd->add_option("--threads", rec.threads, "worker threads (0 = auto)");

  detail::MetricsArgs met;
  auto* met_cmd = app.add_subcommand("metrics", "compare depth maps, images, or CGHs");
  met_cmd->add_option("--est", met.est, "estimated image (pgm or png)");
  met_cmd->add_option("--truth", met.truth, "ground-truth image (pgm or png)");
  met_cmd->add_option("--pred-lee", met.pred_lee, "predicted Lee hologram directory");
  met_cmd->add_option("--truth-lee", met.truth_lee, "ground-truth Lee hologram directory");

  detail::SweepArgs swp;
  auto* swp_cmd = app.add_subcommand("sweep", "run the central-angle sweep");
  swp_cmd->add_option("--data", swp.data, "dataset root")->required();
  swp_cmd->add_option("--scene", swp.scene, "scene shape");
  swp_cmd->add_option("--out", swp.out, "report output directory");
  swp_cmd->add_option("--n-min", swp.n_min, "first schedule level");
  swp_cmd->add_option("--n-max", swp.n_max, "last schedule level");
  swp_cmd->add_option("--baseline", swp.baseline, "nearest | blend");
  swp_cmd->add_option("--threshold", swp.threshold, "knee improvement-ratio threshold");
  swp_cmd->add_flag("--fourk", swp.fourk, "upscale views to 3840x2160 before synthesis");
  swp_cmd->add_option("--threads", swp.threads, "worker threads (0 = auto)");
  swp.optics.attach(swp_cmd);

  detail::KneeArgs knee;
  auto* knee_cmd = app.add_subcommand("knee", "locate the quality/cost knee in a sweep CSV");
  knee_cmd->add_option("--csv", knee.csv, "sweep CSV path")->required();
  knee_cmd->add_option("--threshold", knee.threshold, "improvement-ratio threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen_cmd->parsed()) detail::run_gen(gen);
    if (est_cmd->parsed()) detail::run_estimate(est);
    if (synth_cmd->parsed()) detail::run_synth(synth);
    if (rec_cmd->parsed()) detail::run_recon(rec);
    if (met_cmd->parsed()) detail::run_metrics(met);
    if (swp_cmd->parsed()) detail::run_sweep_cmd(swp);
    if (knee_cmd->parsed()) detail::run_knee(knee);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

/// Test helper: run with argv-style strings.
inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("holosweep");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace holosweep::cli
