#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "holosweep/dataset.hpp"
#include "holosweep/depthest.hpp"
#include "holosweep/errors.hpp"
#include "holosweep/holo.hpp"
#include "holosweep/metrics.hpp"
#include "holosweep/parallel.hpp"
#include "holosweep/recon.hpp"
#include "holosweep/viewgeom.hpp"

namespace holosweep::sweep {

namespace fs = std::filesystem;

/// One sweep row: schedule level, mean held-out metrics, and per-stage
/// wall-clock cost summed over test views.
struct SweepRecord {
  int n = 0;
  double central_angle_deg = 0.0;
  int train_views = 0;
  int test_views = 0;
  double depth_mse = 0.0;  // normalized units^2
  double depth_acc = 0.0;
  double cgh_acc = 0.0;
  double t_estimate_s = 0.0;
  double t_synth_s = 0.0;
  double t_recon_s = 0.0;
};

struct SweepConfig {
  fs::path data_root;
  std::string shape = "torus";
  fs::path out_dir;  // empty: no files written
  int n_min = viewgeom::kMinLevel;
  int n_max = viewgeom::kMaxLevel;
  depthest::Baseline baseline = depthest::Baseline::blend;
  holo::OpticsConfig optics;
  double knee_threshold = 1.5;
  bool fourk = false;
  int fourk_width = 3840;   // upscale target; tests may shrink it
  int fourk_height = 2160;
  unsigned threads = 0;
};

inline constexpr int kFourKWidth = 3840;
inline constexpr int kFourKHeight = 2160;

struct KneeResult {
  double knee_angle_deg = 0.0;
  std::vector<double> improvement_ratios;  // MSE(n) / MSE(n+1) per step
  double threshold = 0.0;
};

/// Finds the smallest central angle whose refinement step still improved MSE
/// by at least `threshold`. Input is (angle, mse) sorted by descending angle;
/// the knee is the destination angle of the last qualifying step, or the
/// largest angle when no step qualifies.
inline KneeResult detect_knee(const std::vector<std::pair<double, double>>& angle_mse,
                              double threshold) {
  if (angle_mse.size() < 2) throw ConfigError("knee detection needs at least two sweep points");
  if (!(threshold > 0.0)) throw ConfigError("knee threshold must be positive");
  for (std::size_t i = 0; i < angle_mse.size(); ++i) {
    if (!(angle_mse[i].second > 0.0))
      throw DataError("knee detection requires positive MSE values");
    if (i > 0 && !(angle_mse[i].first < angle_mse[i - 1].first))
      throw DataError("knee series must be sorted by descending angle");
  }
  KneeResult result;
  result.threshold = threshold;
  result.knee_angle_deg = angle_mse.front().first;
  for (std::size_t i = 0; i + 1 < angle_mse.size(); ++i) {
    const double ratio = angle_mse[i].second / angle_mse[i + 1].second;
    result.improvement_ratios.push_back(ratio);
    if (ratio >= threshold) result.knee_angle_deg = angle_mse[i + 1].first;
  }
  return result;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct ViewResult {
  double mse = 0.0;
  double acc = 0.0;
  double cgh = 0.0;
  double t_estimate = 0.0;
  double t_synth = 0.0;
  double t_recon = 0.0;
};

}  // namespace detail

inline void write_sweep_csv(const fs::path& path, const std::vector<SweepRecord>& records) {
  std::ostringstream out;
  out << "n,central_angle_deg,train_views,test_views,depth_mse,depth_acc,cgh_acc,"
         "t_estimate_s,t_synth_s,t_recon_s\n";
  for (const auto& r : records) {
    out.precision(17);
    out << r.n << "," << r.central_angle_deg << "," << r.train_views << "," << r.test_views
        << "," << r.depth_mse << "," << r.depth_acc << "," << r.cgh_acc << ",";
    out.precision(6);
    out << std::fixed << r.t_estimate_s << "," << r.t_synth_s << "," << r.t_recon_s << "\n";
    out.unsetf(std::ios_base::fixed);
  }
  io::write_text(path, out.str());
}

inline std::vector<SweepRecord> read_sweep_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty sweep CSV: " + path.string());
  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw DataError("malformed sweep CSV row: " + line);
    try {
      SweepRecord r;
      r.n = std::stoi(cells[0]);
      r.central_angle_deg = std::stod(cells[1]);
      r.train_views = std::stoi(cells[2]);
      r.test_views = std::stoi(cells[3]);
      r.depth_mse = std::stod(cells[4]);
      r.depth_acc = std::stod(cells[5]);
      r.cgh_acc = std::stod(cells[6]);
      r.t_estimate_s = std::stod(cells[7]);
      r.t_synth_s = std::stod(cells[8]);
      r.t_recon_s = std::stod(cells[9]);
      records.push_back(r);
    } catch (const std::exception&) {
      throw DataError("malformed sweep CSV row: " + line);
    }
  }
  return records;
}

inline std::string report_text(const std::vector<SweepRecord>& records,
                               const std::optional<KneeResult>& knee) {
  std::ostringstream out;
  out << "central-angle sweep (" << records.size() << " levels)\n";
  for (const auto& r : records) {
    out << "  n=" << r.n << "  angle=" << r.central_angle_deg << " deg"
        << "  views=" << r.train_views << "+" << r.test_views
        << "  depth MSE=" << r.depth_mse << " (" << r.depth_mse * 255.0 * 255.0 << " byte^2)"
        << "  depth ACC=" << r.depth_acc << "  CGH ACC=" << r.cgh_acc
        << "  t_est=" << r.t_estimate_s << "s  t_synth=" << r.t_synth_s
        << "s  t_recon=" << r.t_recon_s << "s\n";
  }
  if (knee) {
    out << "improvement ratios:";
    for (double ratio : knee->improvement_ratios) out << " " << ratio;
    out << "\nknee: " << knee->knee_angle_deg << " deg (threshold " << knee->threshold << ")\n";
  }
  return out.str();
}

/// Gnuplot script plotting the three metric trends against central angle on
/// a log axis, with a vertical marker at the knee when one was detected.
inline std::string plot_script(const std::string& csv_name,
                               const std::vector<SweepRecord>& records,
                               const std::optional<KneeResult>& knee) {
  std::ostringstream out;
  out << "set datafile separator ','\n"
      << "set logscale x\n"
      << "set xlabel 'central angle (deg)'\n"
      << "set ylabel 'depth MSE (normalized)'\n"
      << "set y2label 'ACC'\n"
      << "set y2tics\n"
      << "set key left top\n";
  if (knee && records.size() > 1)
    out << "set arrow from " << knee->knee_angle_deg << ",graph 0 to " << knee->knee_angle_deg
        << ",graph 1 nohead dashtype 2\n";
  out << "plot '" << csv_name << "' skip 1 using 2:5 axes x1y1 with linespoints title 'depth MSE', \\\n"
      << "     '" << csv_name << "' skip 1 using 2:6 axes x1y2 with linespoints title 'depth ACC', \\\n"
      << "     '" << csv_name << "' skip 1 using 2:7 axes x1y2 with linespoints title 'CGH ACC'\n";
  return out.str();
}

inline void write_report(const fs::path& out_dir, const std::vector<SweepRecord>& records,
                         const std::optional<KneeResult>& knee) {
  if (records.empty()) throw ConfigError("cannot report an empty sweep");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  write_sweep_csv(out_dir / "sweep.csv", records);
  io::write_text(out_dir / "sweep_summary.txt", report_text(records, knee));
  io::write_text(out_dir / "sweep_plot.gp", plot_script("sweep.csv", records, knee));
}

/// Runs the full process for each level: fit the baseline on the training
/// views, estimate every held-out view, synthesize CGHs from ground-truth and
/// estimated depths, score them, and reconstruct once for the cost column.
/// Rows come back in ascending n; files are only written after every level
/// finished, so a failed run leaves no partial CSV.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  cfg.optics.validate();
  if (cfg.n_min < viewgeom::kMinLevel || cfg.n_max > viewgeom::kMaxLevel ||
      cfg.n_min > cfg.n_max)
    throw ConfigError("sweep range must satisfy " + std::to_string(viewgeom::kMinLevel) +
                      " <= n_min <= n_max <= " + std::to_string(viewgeom::kMaxLevel));

  const auto manifest = scenegen::load_manifest(cfg.data_root, cfg.shape);
  const int required_views = 1 << (cfg.n_max + 1);
  if (manifest.view_count < required_views)
    throw ConfigError("dataset has " + std::to_string(manifest.view_count) +
                      " views but n_max=" + std::to_string(cfg.n_max) + " needs " +
                      std::to_string(required_views));

  const holo::Synthesizer synthesizer(cfg.optics);
  const double recon_focus = (cfg.optics.z_near_m + cfg.optics.z_far_m) / 2.0;

  std::vector<SweepRecord> records;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const auto sched = viewgeom::schedule(n);

    std::vector<depthest::TrainView> train;
    train.reserve(sched.train_angles_deg.size());
    for (double angle : sched.train_angles_deg) {
      const int index = scenegen::view_index_for_angle(manifest, angle);
      train.push_back({angle, scenegen::load_view_depth(cfg.data_root, manifest, index)});
    }
    const auto state = depthest::fit_depths(std::move(train), n, cfg.baseline);

    const auto& test_angles = sched.test_angles_deg;
    std::vector<detail::ViewResult> results(test_angles.size());
    parallel_for(
        static_cast<int>(test_angles.size()),
        [&](int i) {
          const double angle = test_angles[static_cast<std::size_t>(i)];
          const int index = scenegen::view_index_for_angle(manifest, angle);
          const scenegen::Frame frame = scenegen::load_view(cfg.data_root, manifest, index);
          detail::ViewResult r;

          auto t0 = std::chrono::steady_clock::now();
          const ImageU8 estimated = depthest::estimate(state, frame.rgb, angle);
          r.t_estimate = detail::seconds_since(t0);

          r.mse = metrics::mse(estimated, frame.depth).normalized;
          r.acc = metrics::acc(estimated, frame.depth);

          ImageRgb8 rgb = frame.rgb;
          ImageU8 truth_depth = frame.depth;
          ImageU8 est_depth = estimated;
          if (cfg.fourk) {
            rgb = upscale_nearest(rgb, cfg.fourk_width, cfg.fourk_height);
            truth_depth = upscale_nearest(truth_depth, cfg.fourk_width, cfg.fourk_height);
            est_depth = upscale_nearest(est_depth, cfg.fourk_width, cfg.fourk_height);
          }

          t0 = std::chrono::steady_clock::now();
          const auto truth_fields = synthesizer.synthesize(rgb, truth_depth);
          const auto est_fields = synthesizer.synthesize(rgb, est_depth);
          r.t_synth = detail::seconds_since(t0);

          const auto truth_lee = holo::lee_encode_rgb(truth_fields, cfg.optics);
          const auto est_lee = holo::lee_encode_rgb(est_fields, cfg.optics);
          r.cgh = metrics::cgh_acc(est_lee, truth_lee);

          t0 = std::chrono::steady_clock::now();
          (void)recon::reconstruct(est_fields, recon_focus, cfg.optics);
          r.t_recon = detail::seconds_since(t0);

          results[static_cast<std::size_t>(i)] = r;
        },
        cfg.threads);

    SweepRecord record;
    record.n = n;
    record.central_angle_deg = sched.level.angle_deg;
    record.train_views = static_cast<int>(sched.train_angles_deg.size());
    record.test_views = static_cast<int>(test_angles.size());
    for (const auto& r : results) {
      record.depth_mse += r.mse;
      record.depth_acc += r.acc;
      record.cgh_acc += r.cgh;
      record.t_estimate_s += r.t_estimate;
      record.t_synth_s += r.t_synth;
      record.t_recon_s += r.t_recon;
    }
    const double count = static_cast<double>(results.size());
    record.depth_mse /= count;
    record.depth_acc /= count;
    record.cgh_acc /= count;
    records.push_back(record);
  }

  std::optional<KneeResult> knee;
  bool all_positive = true;
  for (const auto& r : records) all_positive = all_positive && r.depth_mse > 0.0;
  if (records.size() >= 2 && all_positive) {
    // degenerate scenes can reach zero error, which has no finite ratio
    std::vector<std::pair<double, double>> series;
    series.reserve(records.size());
    for (const auto& r : records) series.emplace_back(r.central_angle_deg, r.depth_mse);
    knee = detect_knee(series, cfg.knee_threshold);
  }
  if (!cfg.out_dir.empty()) write_report(cfg.out_dir, records, knee);
  return records;
}

}  // namespace holosweep::sweep
