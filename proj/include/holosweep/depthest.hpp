#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "holosweep/errors.hpp"
#include "holosweep/image.hpp"
#include "holosweep/metrics.hpp"
#include "holosweep/scene.hpp"
#include "holosweep/viewgeom.hpp"

namespace holosweep::depthest {

/// Geometric stand-ins for a learned depth estimator. `nearest` copies the
/// angularly closest training depth map; `blend` interpolates the two
/// bracketing maps per pixel. Both ignore the RGB query image, which the
/// interface keeps so a learned estimator can slot in.
enum class Baseline { nearest, blend };

inline const char* baseline_name(Baseline b) {
  return b == Baseline::nearest ? "nearest" : "blend";
}

inline Baseline parse_baseline(const std::string& name) {
  if (name == "nearest") return Baseline::nearest;
  if (name == "blend") return Baseline::blend;
  throw ConfigError("unknown baseline: " + name);
}

struct TrainView {
  double angle_deg = 0.0;
  ImageU8 depth;
};

/// Immutable fitted state: training depth maps indexed by angle, sorted.
class EstimatorState {
 public:
  EstimatorState(Baseline kind, int level_n, std::vector<TrainView> views)
      : kind_(kind), level_n_(level_n), views_(std::move(views)) {}

  Baseline kind() const { return kind_; }
  int level() const { return level_n_; }
  const std::vector<TrainView>& views() const { return views_; }

 private:
  Baseline kind_;
  int level_n_;
  std::vector<TrainView> views_;
};

inline EstimatorState fit_depths(std::vector<TrainView> views, int n, Baseline kind) {
  const auto sched = viewgeom::schedule(n);
  std::sort(views.begin(), views.end(),
            [](const TrainView& a, const TrainView& b) { return a.angle_deg < b.angle_deg; });
  if (views.size() != sched.train_angles_deg.size())
    throw DataError("training set must cover exactly " +
                    std::to_string(sched.train_angles_deg.size()) + " views for n=" +
                    std::to_string(n) + ", got " + std::to_string(views.size()));
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].angle_deg != sched.train_angles_deg[i])
      throw DataError("training angles do not match the schedule for n=" + std::to_string(n));
    if (views[i].depth.empty()) throw DataError("training view has an empty depth map");
    if (!views[i].depth.same_size(views[0].depth))
      throw DataError("training depth maps differ in resolution");
  }
  return EstimatorState(kind, n, std::move(views));
}

inline EstimatorState fit(std::span<const scenegen::Frame> train_frames, int n, Baseline kind) {
  std::vector<TrainView> views;
  views.reserve(train_frames.size());
  for (const auto& f : train_frames) views.push_back({f.pose.angle_deg, f.depth});
  return fit_depths(std::move(views), n, kind);
}

namespace detail {

inline double wrap_angle(double a) {
  double r = std::fmod(a, 360.0);
  if (r < 0.0) r += 360.0;
  return r;
}

inline std::size_t nearest_index(const std::vector<TrainView>& views, double query) {
  std::size_t best = 0;
  double best_distance = 1e300;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const double d = viewgeom::angular_distance_deg(query, views[i].angle_deg);
    // exact tie goes to the smaller angle; views are sorted ascending
    if (d < best_distance) {
      best_distance = d;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

inline ImageU8 estimate(const EstimatorState& state, const ImageRgb8& /*rgb*/,
                        double query_angle_deg) {
  const auto& views = state.views();
  const double query = detail::wrap_angle(query_angle_deg);

  if (state.kind() == Baseline::nearest)
    return views[detail::nearest_index(views, query)].depth;

  // blend: find the bracketing pair around the circle
  std::size_t upper = 0;
  while (upper < views.size() && views[upper].angle_deg <= query) ++upper;
  const std::size_t lower = (upper == 0 ? views.size() : upper) - 1;
  const std::size_t upper_wrapped = upper % views.size();

  const double d_lower = detail::wrap_angle(query - views[lower].angle_deg);
  const double d_upper = detail::wrap_angle(views[upper_wrapped].angle_deg - query);
  if (d_lower == 0.0) return views[lower].depth;
  if (d_upper == 0.0) return views[upper_wrapped].depth;

  // inverse-distance weights over the bracketing views
  const double w_lower = d_upper / (d_lower + d_upper);
  const double w_upper = d_lower / (d_lower + d_upper);
  const auto& lo = views[lower].depth;
  const auto& hi = views[upper_wrapped].depth;
  ImageU8 out(lo.width(), lo.height());
  for (std::size_t i = 0; i < out.pixels().size(); ++i) {
    const double v = w_lower * lo.pixels()[i] + w_upper * hi.pixels()[i];
    out.pixels()[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
  }
  return out;
}

struct EvalEntry {
  double angle_deg = 0.0;
  metrics::MseResult mse;
  double acc = 0.0;
};

inline std::vector<EvalEntry> evaluate(const EstimatorState& state,
                                       std::span<const scenegen::Frame> test_frames) {
  std::vector<EvalEntry> out;
  out.reserve(test_frames.size());
  for (const auto& frame : test_frames) {
    const ImageU8 est = estimate(state, frame.rgb, frame.pose.angle_deg);
    if (!est.same_size(frame.depth)) throw DataError("evaluate: resolution mismatch");
    out.push_back(
        {frame.pose.angle_deg, metrics::mse(est, frame.depth), metrics::acc(est, frame.depth)});
  }
  return out;
}

}  // namespace holosweep::depthest
