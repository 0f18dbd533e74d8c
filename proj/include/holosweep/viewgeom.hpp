#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "holosweep/errors.hpp"
#include "holosweep/vec3.hpp"

namespace holosweep::viewgeom {

inline constexpr int kMinLevel = 2;
inline constexpr int kMaxLevel = 9;
inline constexpr double kDefaultTrackRadiusM = 0.20;

/// One refinement level of the circular capture track: 2^n viewpoints
/// separated by 360/2^n degrees.
struct CentralAngleLevel {
  int n = 0;
  double angle_deg = 0.0;
};

inline CentralAngleLevel central_angle(int n) {
  if (n < kMinLevel || n > kMaxLevel)
    throw ConfigError("central angle level n must be in [" + std::to_string(kMinLevel) + ", " +
                      std::to_string(kMaxLevel) + "], got " + std::to_string(n));
  // 360 / 2^n is an exact binary fraction of 360; no trig drift across levels.
  return {n, 360.0 / static_cast<double>(1 << n)};
}

/// Training views at k*angle and held-out test views at the midpoints between
/// adjacent training views.
struct ViewSchedule {
  CentralAngleLevel level;
  std::vector<double> train_angles_deg;
  std::vector<double> test_angles_deg;
};

inline ViewSchedule schedule(int n) {
  const CentralAngleLevel level = central_angle(n);
  const int count = 1 << n;
  ViewSchedule s;
  s.level = level;
  s.train_angles_deg.reserve(count);
  s.test_angles_deg.reserve(count);
  const double half = level.angle_deg / 2.0;
  for (int k = 0; k < count; ++k) {
    const double a = static_cast<double>(k) * level.angle_deg;
    s.train_angles_deg.push_back(a);
    s.test_angles_deg.push_back(a + half);
  }
  return s;
}

/// Circular distance between two track angles, in [0, 180].
inline double angular_distance_deg(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  if (d > 180.0) d = 360.0 - d;
  return d;
}

/// A viewpoint on the track: position on the circle of radius_m in the z=0
/// plane, aimed at the origin. Angle 0 sits on the +x axis, counterclockwise
/// positive.
struct CameraPose {
  double angle_deg = 0.0;
  double radius_m = kDefaultTrackRadiusM;
  Vec3 position;
  Vec3 forward;
};

namespace detail {

// cos/sin of a track angle with exact values at quadrant multiples, so
// frames related by quarter turns are rigid permutations bit for bit.
inline void track_cos_sin(double angle_deg, double& c, double& s) {
  double a = std::fmod(angle_deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (a == 90.0) {
    c = 0.0;
    s = 1.0;
  } else if (a == 180.0) {
    c = -1.0;
    s = 0.0;
  } else if (a == 270.0) {
    c = 0.0;
    s = -1.0;
  } else {
    const double rad = a * (3.141592653589793238462643383279502884 / 180.0);
    c = std::cos(rad);
    s = std::sin(rad);
  }
}

}  // namespace detail

inline CameraPose camera_pose(double angle_deg, double radius_m = kDefaultTrackRadiusM) {
  if (!(radius_m > 0.0)) throw ConfigError("camera track radius must be positive");
  double c = 0.0;
  double s = 0.0;
  detail::track_cos_sin(angle_deg, c, s);
  CameraPose pose;
  pose.angle_deg = angle_deg;
  pose.radius_m = radius_m;
  pose.position = {radius_m * c, radius_m * s, 0.0};
  pose.forward = {-c, -s, 0.0};
  return pose;
}

/// Right-handed view basis for a pose: right = forward x world-up, up = +z.
struct CameraBasis {
  Vec3 right;
  Vec3 up;
  Vec3 forward;
};

inline CameraBasis camera_basis(const CameraPose& pose) {
  const Vec3 world_up{0.0, 0.0, 1.0};
  return {cross(pose.forward, world_up), world_up, pose.forward};
}

}  // namespace holosweep::viewgeom
