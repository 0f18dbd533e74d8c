// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holosweep/dataset.hpp"
#include "holosweep/depthest.hpp"
#include "holosweep/fft.hpp"
#include "holosweep/holo.hpp"
#include "holosweep/metrics.hpp"
#include "holosweep/recon.hpp"
#include "holosweep/scene.hpp"
#include "holosweep/sweep.hpp"
#include "holosweep/viewgeom.hpp"

using namespace holosweep;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int number;
  const char* name;
  std::function<bool(std::string&)> run;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "holosweep_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// shared 128-view torus dataset at 256x256, rendered once
const fs::path& torus_dataset() {
  static const fs::path root = [] {
    const fs::path dir = work_dir() / "data";
    const auto scene = scenegen::SceneSpec::preset(scenegen::ShapeKind::torus);
    scenegen::generate_dataset(scene, 128, dir, {256, 256, 60.0}, {}, 0.20, 0);
    return dir;
  }();
  return root;
}

holo::ComplexField random_bandlimited_field(int n, double wavelength, double pitch, double zmax,
                                            std::mt19937& rng) {
  holo::ComplexField f(n, n, wavelength, pitch);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& v : f.values) v = {gauss(rng), gauss(rng)};
  const double df = 1.0 / (n * pitch);
  const double limit = 0.8 * holo::detail::band_limit(wavelength, df, zmax);
  fftutil::fft2_inplace(n, n, f.values, fftutil::Direction::forward);
  for (int y = 0; y < n; ++y) {
    const double fy = holo::detail::fft_frequency(y, n, pitch);
    for (int x = 0; x < n; ++x) {
      const double fx = holo::detail::fft_frequency(x, n, pitch);
      if (std::fabs(fx) > limit || std::fabs(fy) > limit) f.at(x, y) = 0.0;
    }
  }
  fftutil::fft2_inplace(n, n, f.values, fftutil::Direction::inverse);
  return f;
}

// ---------------------------------------------------------------- criteria

bool schedule_exactness(std::string& detail) {
  bool ok = true;
  for (int n = 2; n <= 9; ++n) {
    const auto level = viewgeom::central_angle(n);
    ok = ok && level.angle_deg == 360.0 / static_cast<double>(1 << n);
    const auto sched = viewgeom::schedule(n);
    ok = ok && sched.train_angles_deg.size() == (std::size_t{1} << n);
    ok = ok && sched.test_angles_deg.size() == (std::size_t{1} << n);
    for (std::size_t k = 0; k < sched.train_angles_deg.size(); ++k) {
      ok = ok && sched.train_angles_deg[k] == static_cast<double>(k) * level.angle_deg;
      ok = ok && sched.test_angles_deg[k] ==
                     sched.train_angles_deg[k] + level.angle_deg / 2.0;
    }
    for (double t : sched.test_angles_deg) {
      double nearest = 1e300;
      for (double a : sched.train_angles_deg)
        nearest = std::min(nearest, viewgeom::angular_distance_deg(t, a));
      ok = ok && nearest == level.angle_deg / 2.0;
    }
  }
  detail = "n=2..9 angles, counts, and midpoints exact";
  return ok;
}

bool lee_codec(std::string& detail) {
  std::mt19937 rng(1001);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  bool structure_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    holo::ComplexField f(64, 64, 520e-9, 8e-6);
    for (auto& v : f.values) v = {gauss(rng), gauss(rng)};
    const auto lee = holo::lee_encode(f);
    const auto back = holo::lee_decode(lee, f.wavelength_m, f.pitch_m);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
      structure_ok = structure_ok && lee.l1.pixels()[i] >= 0.0 && lee.l2.pixels()[i] >= 0.0 &&
                     lee.l3.pixels()[i] >= 0.0 && lee.l4.pixels()[i] >= 0.0;
      structure_ok = structure_ok &&
                     (lee.l1.pixels()[i] == 0.0 || lee.l3.pixels()[i] == 0.0) &&
                     (lee.l2.pixels()[i] == 0.0 || lee.l4.pixels()[i] == 0.0);
    }
  }
  std::ostringstream ss;
  ss << "1000 fields, max round-trip error " << worst;
  detail = ss.str();
  return worst < 1e-12 && structure_ok;
}

bool propagation(std::string& detail) {
  std::mt19937 rng(1002);
  const double z1 = 0.003;
  const double z2 = 0.0045;
  double worst_rt = 0.0;
  double worst_energy = 0.0;
  double worst_semi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double wavelength = trial % 3 == 0 ? 638e-9 : trial % 3 == 1 ? 520e-9 : 450e-9;
    const auto f = random_bandlimited_field(256, wavelength, 8e-6, z1 + z2, rng);
    const auto fwd = holo::propagate(f, z1);
    worst_rt = std::max(worst_rt, holo::relative_l2(holo::propagate(fwd, -z1), f));
    worst_energy = std::max(
        worst_energy, std::fabs(holo::field_energy(fwd) / holo::field_energy(f) - 1.0));
    worst_semi = std::max(
        worst_semi, holo::relative_l2(holo::propagate(fwd, z2), holo::propagate(f, z1 + z2)));
  }
  std::ostringstream ss;
  ss << "round-trip " << worst_rt << ", energy " << worst_energy << ", semigroup "
     << worst_semi;
  detail = ss.str();
  return worst_rt < 1e-9 && worst_energy < 1e-9 && worst_semi < 1e-9;
}

bool focus_localization(std::string& detail) {
  holo::OpticsConfig optics;  // 32 layers, default depths
  optics.phase_mode = holo::PhaseMode::zero;
  const int n = 256;
  const std::uint8_t byte = 200;
  ImageRgb8 rgb(n, n, {0, 0, 0});
  ImageU8 depth(n, n, 0);
  rgb.at(n / 2, n / 2) = {255, 255, 255};
  depth.at(n / 2, n / 2) = byte;
  const double truth = optics.layer_distance(optics.layer_of_byte(byte));

  const auto fields = holo::synthesize(rgb, depth, optics);
  std::vector<double> distances;
  for (int i = 0; i < 64; ++i)
    distances.push_back(optics.z_near_m + (optics.z_far_m - optics.z_near_m) * i / 63.0);
  const auto entries = recon::focus_scan(fields, distances, optics);
  double best_d = 0.0;
  double best = -1.0;
  for (const auto& e : entries)
    if (e.peak_amplitude > best) {
      best = e.peak_amplitude;
      best_d = e.distance_m;
    }
  std::ostringstream ss;
  ss << "argmax " << best_d << " vs layer depth " << truth << " (spacing "
     << optics.layer_spacing() << ")";
  detail = ss.str();
  return std::fabs(best_d - truth) <= optics.layer_spacing();
}

bool accommodation(std::string& detail) {
  const auto scene = scenegen::SceneSpec::preset(scenegen::ShapeKind::cone);
  const scenegen::RenderOptions options{256, 256, 60.0};
  const scenegen::DepthMapping mapping;
  const auto pose = viewgeom::camera_pose(45.0);
  const auto frame = scenegen::render_view(scene, pose, options, mapping);

  holo::OpticsConfig optics;  // 32 layers, seeded random phase
  const auto fields = holo::synthesize(frame, optics);

  const double d0 = scenegen::object_center_depth(scene, pose, 0);
  const double d1 = scenegen::object_center_depth(scene, pose, 1);
  const std::size_t front = d0 <= d1 ? 0 : 1;
  const auto rects = scenegen::object_pixel_regions_disjoint(scene, pose, options, 0.6);
  const PixelRect rect_front = rects[front];
  const PixelRect rect_back = rects[1 - front];

  // focus on an object: scan the layers its body spans, keep the sharpest
  auto focus_on = [&](std::size_t idx, const PixelRect& rect) {
    const int center = optics.layer_of_byte(
        scenegen::depth_quantize(scenegen::object_center_depth(scene, pose, idx), mapping));
    std::vector<double> distances;
    for (int l = std::max(0, center - 4); l <= std::min(optics.layer_count - 1, center + 4);
         ++l)
      distances.push_back(optics.layer_distance(l));
    const auto entries = recon::focus_scan(fields, distances, optics, {rect});
    double best_d = distances.front();
    double best_s = -1.0;
    for (const auto& e : entries)
      if (e.region_sharpness[0] > best_s) {
        best_s = e.region_sharpness[0];
        best_d = e.distance_m;
      }
    return best_d;
  };

  const double focus_front = focus_on(front, rect_front);
  const double focus_back = focus_on(1 - front, rect_back);
  const auto rec_front = recon::reconstruct(fields, focus_front, optics);
  const auto rec_back = recon::reconstruct(fields, focus_back, optics);
  const double ratio_front =
      recon::sharpness(rec_front, rect_front) / recon::sharpness(rec_front, rect_back);
  const double ratio_back =
      recon::sharpness(rec_back, rect_front) / recon::sharpness(rec_back, rect_back);

  std::ostringstream ss;
  ss << "front focus ratio " << ratio_front << " (> 1.2), back focus ratio " << ratio_back
     << " (< " << 1.0 / 1.2 << ")";
  detail = ss.str();
  return ratio_front > 1.2 && ratio_back < 1.0 / 1.2;
}

bool metric_definitions(std::string& detail) {
  std::mt19937 rng(1003);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  bool ok = true;

  std::vector<double> base(64);
  for (auto& v : base) v = value(rng);
  for (double k : {0.5, 1.0, 3.0}) {
    std::vector<double> scaled(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) scaled[i] = k * base[i];
    ok = ok && std::fabs(metrics::acc(base, scaled) - 1.0) < 1e-12;
  }

  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 50; ++trial) {
    ImageU8 a(8, 8);
    ImageU8 b(8, 8);
    for (auto& v : a.pixels()) v = static_cast<std::uint8_t>(byte(rng));
    for (auto& v : b.pixels()) v = static_cast<std::uint8_t>(byte(rng));

    double sum = 0.0;
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        const double av = a.at(x, y) / 255.0;
        const double bv = b.at(x, y) / 255.0;
        sum += (av - bv) * (av - bv);
        dot += static_cast<double>(a.at(x, y)) * b.at(x, y);
        na += static_cast<double>(a.at(x, y)) * a.at(x, y);
        nb += static_cast<double>(b.at(x, y)) * b.at(x, y);
      }
    ok = ok && std::fabs(metrics::mse(a, b).normalized - sum / 64.0) < 1e-12;
    ok = ok && std::fabs(metrics::acc(a, b) - dot / std::sqrt(na * nb)) < 1e-12;
  }
  detail = "scaled-copy identity and 8x8 brute-force oracles within 1e-12";
  return ok;
}

sweep::SweepConfig trend_config() {
  sweep::SweepConfig cfg;
  cfg.data_root = torus_dataset();
  cfg.shape = "torus";
  cfg.n_min = 2;
  cfg.n_max = 6;
  cfg.baseline = depthest::Baseline::blend;
  cfg.threads = 0;  // all cores
  return cfg;
}

bool sweep_trend(std::string& detail) {
  const auto t0 = Clock::now();
  const auto records = sweep::run_sweep(trend_config());
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();

  bool ok = records.size() == 5;
  double mse2 = 0.0;
  double mse5 = 0.0;
  bool monotone = true;
  if (ok) {
    mse2 = records[0].depth_mse;
    mse5 = records[3].depth_mse;
    for (std::size_t i = 0; i + 1 < records.size(); ++i)
      monotone = monotone && records[i + 1].depth_mse <= 1.05 * records[i].depth_mse;
  }
  std::ostringstream ss;
  ss << "sweep " << elapsed << " s, MSE(n=2)/MSE(n=5) = " << (mse5 > 0 ? mse2 / mse5 : 0)
     << ", non-increasing within 5%: " << (monotone ? "yes" : "no");
  detail = ss.str();
  return ok && elapsed < 300.0 && mse5 * 1.5 <= mse2 && monotone;
}

bool knee_detection(std::string& detail) {
  const std::vector<double> ratios{2.0, 2.0, 1.6, 1.05, 1.02, 1.01, 1.0};
  std::vector<std::pair<double, double>> series;
  double mse = 1.0;
  double angle = 90.0;
  series.emplace_back(angle, mse);
  for (double r : ratios) {
    mse /= r;
    angle /= 2.0;
    series.emplace_back(angle, mse);
  }
  const auto knee = sweep::detect_knee(series, 1.5);
  std::ostringstream ss;
  ss << "knee at " << knee.knee_angle_deg << " deg";
  detail = ss.str();
  return knee.knee_angle_deg == 11.25;
}

bool determinism(std::string& detail) {
  sweep::SweepConfig cfg;
  cfg.data_root = torus_dataset();
  cfg.shape = "torus";
  cfg.n_min = 2;
  cfg.n_max = 3;
  cfg.baseline = depthest::Baseline::blend;
  cfg.optics.phase_mode = holo::PhaseMode::zero;
  cfg.optics.phase_seed = 42;
  cfg.threads = 0;

  auto metric_columns = [](const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      rows.push_back(cells[0] + "|" + cells[1] + "|" + cells[2] + "|" + cells[3] + "|" +
                     cells[4] + "|" + cells[5] + "|" + cells[6]);
    }
    return rows;
  };

  cfg.out_dir = work_dir() / "det_a";
  sweep::run_sweep(cfg);
  cfg.out_dir = work_dir() / "det_b";
  sweep::run_sweep(cfg);
  const auto a = metric_columns(work_dir() / "det_a" / "sweep.csv");
  const auto b = metric_columns(work_dir() / "det_b" / "sweep.csv");
  detail = "metric CSV columns bitwise equal across runs";
  return !a.empty() && a == b;
}

bool time_model(std::string& detail) {
  std::mt19937 rng(1004);
  std::uniform_real_distribution<double> t(0.0, 10.0);
  std::uniform_int_distribution<std::int64_t> count(0, 5000);
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const metrics::TimeModel m{t(rng), count(rng), count(rng)};
    ok = ok &&
         metrics::training_time_s(m) == m.t_per_batch_s * static_cast<double>(m.batches * m.epochs);
  }
  ok = ok && metrics::training_time_s({1.0, 10, 5}) == 50.0;
  detail = "t*b*e exact on 1000 randomized models";
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "viewpoint schedule exactness", schedule_exactness},
      {2, "Lee codec round trip and structure", lee_codec},
      {3, "band-limited propagation accuracy", propagation},
      {4, "point-source focus localization", focus_localization},
      {5, "accommodation sharpness contrast", accommodation},
      {6, "metric definitions vs oracles", metric_definitions},
      {7, "sweep quality trend", sweep_trend},
      {8, "knee detection on the reference ratios", knee_detection},
      {9, "sweep determinism", determinism},
      {10, "training-time model", time_model},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto t0 = Clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %2d %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", criterion.number,
                criterion.name, elapsed, detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
