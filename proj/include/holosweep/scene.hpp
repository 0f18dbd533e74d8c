#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "holosweep/errors.hpp"
#include "holosweep/image.hpp"
#include "holosweep/vec3.hpp"
#include "holosweep/viewgeom.hpp"

namespace holosweep::scenegen {

enum class ShapeKind { torus, cube, cone, sphere };

inline const char* shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::torus: return "torus";
    case ShapeKind::cube: return "cube";
    case ShapeKind::cone: return "cone";
    case ShapeKind::sphere: return "sphere";
  }
  return "unknown";
}

inline ShapeKind parse_shape(const std::string& name) {
  if (name == "torus") return ShapeKind::torus;
  if (name == "cube") return ShapeKind::cube;
  if (name == "cone") return ShapeKind::cone;
  if (name == "sphere") return ShapeKind::sphere;
  throw ConfigError("unknown scene shape: " + name);
}

/// Linear depth-byte mapping: near_m maps to byte 255, far_m to byte 0.
struct DepthMapping {
  double near_m = 0.11;
  double far_m = 0.287;
};

inline void validate_mapping(const DepthMapping& m) {
  if (!(m.near_m > 0.0) || !(m.near_m < m.far_m))
    throw ConfigError("depth mapping requires 0 < near_m < far_m");
}

inline std::uint8_t depth_quantize(double distance_m, const DepthMapping& m) {
  const double t = std::clamp((m.far_m - distance_m) / (m.far_m - m.near_m), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(255.0 * t + 0.5));
}

enum class Axis { x, y, z };

/// One placed primitive. Size fields are read per kind: sphere uses radius;
/// cube uses edge; cone uses radius and height (axis +z, apex up); torus uses
/// radius (ring) and minor_radius (tube) around ring_axis.
struct Primitive {
  ShapeKind kind = ShapeKind::sphere;
  Vec3 center;
  Rgb8 color;
  double radius = 0.025;
  double minor_radius = 0.01;
  double edge = 0.04;
  double height = 0.05;
  Axis ring_axis = Axis::z;
  bool enabled = true;

  static Primitive sphere(Vec3 c, double r, Rgb8 color) {
    Primitive p;
    p.kind = ShapeKind::sphere;
    p.center = c;
    p.radius = r;
    p.color = color;
    return p;
  }
  static Primitive cube(Vec3 c, double edge, Rgb8 color) {
    Primitive p;
    p.kind = ShapeKind::cube;
    p.center = c;
    p.edge = edge;
    p.color = color;
    return p;
  }
  static Primitive cone(Vec3 c, double base_radius, double height, Rgb8 color) {
    Primitive p;
    p.kind = ShapeKind::cone;
    p.center = c;
    p.radius = base_radius;
    p.height = height;
    p.color = color;
    return p;
  }
  static Primitive torus(Vec3 c, double ring_radius, double tube_radius, Axis axis, Rgb8 color) {
    Primitive p;
    p.kind = ShapeKind::torus;
    p.center = c;
    p.radius = ring_radius;
    p.minor_radius = tube_radius;
    p.ring_axis = axis;
    p.color = color;
    return p;
  }
};

/// A two-primitive capture scene. `objects` normally holds two entries; tests
/// may disable or replace them.
struct SceneSpec {
  ShapeKind shape_kind = ShapeKind::torus;
  double object_separation_m = 0.083;
  Rgb8 background{0, 0, 0};
  std::vector<Primitive> objects;

  /// Bundled default scene: a pair of identical primitives on the x axis at
  /// +/- separation/2, so one sits nearer the camera at track angle 0.
  static SceneSpec preset(ShapeKind kind) {
    SceneSpec s;
    s.shape_kind = kind;
    const double off = s.object_separation_m / 2.0;
    const Rgb8 front{225, 96, 64};
    const Rgb8 back{64, 128, 224};
    auto make = [&](double cx, Rgb8 color) {
      switch (kind) {
        case ShapeKind::sphere: return Primitive::sphere({cx, 0.0, 0.0}, 0.025, color);
        case ShapeKind::cube: return Primitive::cube({cx, 0.0, 0.0}, 0.04, color);
        case ShapeKind::cone: return Primitive::cone({cx, 0.0, 0.0}, 0.025, 0.05, color);
        case ShapeKind::torus:
          // Ring axis along the object axis: a track-axis ring at these
          // dimensions would leave the depth-slab margin.
          return Primitive::torus({cx, 0.0, 0.0}, 0.025, 0.01, Axis::x, color);
      }
      throw ConfigError("unhandled shape kind");
    };
    s.objects.push_back(make(off, front));
    s.objects.push_back(make(-off, back));
    return s;
  }
};

inline constexpr double kSlabMarginM = 0.02;

namespace detail {

inline void validate_primitive(const Primitive& p) {
  switch (p.kind) {
    case ShapeKind::sphere:
      if (!(p.radius > 0.0)) throw ConfigError("degenerate sphere: radius must be positive");
      break;
    case ShapeKind::cube:
      if (!(p.edge > 0.0)) throw ConfigError("degenerate cube: edge must be positive");
      break;
    case ShapeKind::cone:
      if (!(p.radius > 0.0) || !(p.height > 0.0))
        throw ConfigError("degenerate cone: radius and height must be positive");
      break;
    case ShapeKind::torus:
      if (!(p.radius > 0.0) || !(p.minor_radius > 0.0) || !(p.minor_radius < p.radius))
        throw ConfigError("degenerate torus: requires 0 < tube < ring radius");
      break;
  }
}

// Conservative bound on max sqrt(x^2 + y^2) over the primitive surface,
// measured from the track origin. Planar camera depth over a full rotation
// spans [R - reach, R + reach].
inline double xy_reach(const Primitive& p) {
  const double cx = std::fabs(p.center.x);
  const double cy = std::fabs(p.center.y);
  const double c = std::sqrt(cx * cx + cy * cy);
  switch (p.kind) {
    case ShapeKind::sphere: return c + p.radius;
    case ShapeKind::cube: {
      const double h = p.edge / 2.0;
      return std::sqrt((cx + h) * (cx + h) + (cy + h) * (cy + h));
    }
    case ShapeKind::cone: return c + p.radius;
    case ShapeKind::torus: {
      const double outer = p.radius + p.minor_radius;
      if (p.ring_axis == Axis::z) return c + outer;
      const double axial = p.minor_radius;
      return std::sqrt((c + axial) * (c + axial) + outer * outer);
    }
  }
  return c;
}

inline double max3(double a, double b, double c) { return std::max(a, std::max(b, c)); }

inline double sd_sphere(const Vec3& p, double r) {
  return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z) - r;
}

inline double sd_cube(const Vec3& p, double half) {
  const double qx = std::fabs(p.x) - half;
  const double qy = std::fabs(p.y) - half;
  const double qz = std::fabs(p.z) - half;
  const double mx = std::max(qx, 0.0);
  const double my = std::max(qy, 0.0);
  const double mz = std::max(qz, 0.0);
  return std::sqrt(mx * mx + my * my + mz * mz) + std::min(max3(qx, qy, qz), 0.0);
}

// Capped cone around +z, apex up, exact distance (Quilez formulation with
// top radius 0).
inline double sd_cone(const Vec3& p, double base_radius, double height) {
  const double hh = height / 2.0;
  const double qx = std::sqrt(p.x * p.x + p.y * p.y);
  const double qy = p.z;
  const double k2x = -base_radius;
  const double k2y = 2.0 * hh;
  const double cax = qx - std::min(qx, qy < 0.0 ? base_radius : 0.0);
  const double cay = std::fabs(qy) - hh;
  const double proj =
      std::clamp(((0.0 - qx) * k2x + (hh - qy) * k2y) / (k2x * k2x + k2y * k2y), 0.0, 1.0);
  const double cbx = qx - 0.0 + k2x * proj;
  const double cby = qy - hh + k2y * proj;
  const double s = (cbx < 0.0 && cay < 0.0) ? -1.0 : 1.0;
  const double d2 = std::min(cax * cax + cay * cay, cbx * cbx + cby * cby);
  return s * std::sqrt(d2);
}

inline double sd_torus(const Vec3& p, double ring, double tube, Axis axis) {
  double radial = 0.0;
  double axial = 0.0;
  switch (axis) {
    case Axis::x:
      radial = std::sqrt(p.y * p.y + p.z * p.z);
      axial = p.x;
      break;
    case Axis::y:
      radial = std::sqrt(p.x * p.x + p.z * p.z);
      axial = p.y;
      break;
    case Axis::z:
      radial = std::sqrt(p.x * p.x + p.y * p.y);
      axial = p.z;
      break;
  }
  const double dx = radial - ring;
  return std::sqrt(dx * dx + axial * axial) - tube;
}

inline double primitive_distance(const Primitive& prim, const Vec3& world) {
  const Vec3 p = world - prim.center;
  switch (prim.kind) {
    case ShapeKind::sphere: return sd_sphere(p, prim.radius);
    case ShapeKind::cube: return sd_cube(p, prim.edge / 2.0);
    case ShapeKind::cone: return sd_cone(p, prim.radius, prim.height);
    case ShapeKind::torus: return sd_torus(p, prim.radius, prim.minor_radius, prim.ring_axis);
  }
  return 1e30;
}

struct SceneSample {
  double distance = 1e30;
  int object = -1;
};

inline SceneSample scene_distance(const SceneSpec& scene, const Vec3& p) {
  SceneSample s;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    if (!scene.objects[i].enabled) continue;
    const double d = primitive_distance(scene.objects[i], p);
    if (d < s.distance) {
      s.distance = d;
      s.object = static_cast<int>(i);
    }
  }
  return s;
}

inline constexpr double kHitEps = 1e-7;
inline constexpr int kMaxSteps = 512;

struct RayHit {
  bool hit = false;
  double t = 0.0;
  int object = -1;
};

inline RayHit trace(const SceneSpec& scene, const Vec3& origin, const Vec3& dir, double t_max) {
  double t = 0.0;
  for (int i = 0; i < kMaxSteps; ++i) {
    const SceneSample s = scene_distance(scene, origin + t * dir);
    if (s.object < 0) return {};
    if (s.distance < kHitEps) return {true, t, s.object};
    t += s.distance;
    if (t > t_max) return {};
  }
  return {};
}

inline Vec3 scene_normal(const SceneSpec& scene, const Vec3& p) {
  const double h = 1e-6;
  const double dx = scene_distance(scene, {p.x + h, p.y, p.z}).distance -
                    scene_distance(scene, {p.x - h, p.y, p.z}).distance;
  const double dy = scene_distance(scene, {p.x, p.y + h, p.z}).distance -
                    scene_distance(scene, {p.x, p.y - h, p.z}).distance;
  const double dz = scene_distance(scene, {p.x, p.y, p.z + h}).distance -
                    scene_distance(scene, {p.x, p.y, p.z - h}).distance;
  return normalized({dx, dy, dz});
}

}  // namespace detail

inline void validate_scene(const SceneSpec& scene, const DepthMapping& mapping, double radius_m) {
  validate_mapping(mapping);
  if (!(radius_m > 0.0)) throw ConfigError("camera radius must be positive");
  for (const auto& prim : scene.objects) {
    if (!prim.enabled) continue;
    detail::validate_primitive(prim);
    const double reach = detail::xy_reach(prim);
    if (radius_m - reach < mapping.near_m + kSlabMarginM ||
        radius_m + reach > mapping.far_m - kSlabMarginM)
      throw ConfigError("object leaves the depth slab margin of " +
                        std::to_string(kSlabMarginM) + " m over the camera track");
  }
}

/// One captured view: color image plus 8-bit depth map at the same size.
/// Background (no surface hit) renders the scene background color with depth
/// byte 0.
struct Frame {
  ImageRgb8 rgb;
  ImageU8 depth;
  viewgeom::CameraPose pose;

  int width() const { return rgb.width(); }
  int height() const { return rgb.height(); }
};

struct RenderOptions {
  int width = 640;
  int height = 360;
  double hfov_deg = 60.0;
};

struct RenderOutput {
  Frame frame;
  ImageU8 object_id;  // 0 = background, k = objects[k-1]
};

inline RenderOutput render_with_ids(const SceneSpec& scene, const viewgeom::CameraPose& pose,
                                    const RenderOptions& options, const DepthMapping& mapping) {
  validate_scene(scene, mapping, pose.radius_m);
  if (options.width <= 0 || options.height <= 0 || !(options.hfov_deg > 0.0) ||
      !(options.hfov_deg < 180.0))
    throw ConfigError("invalid render options");

  const auto basis = viewgeom::camera_basis(pose);
  const double tan_half = std::tan(options.hfov_deg * (3.141592653589793238462643383279502884 /
                                                       180.0) /
                                   2.0);
  const double fpx = (static_cast<double>(options.width) / 2.0) / tan_half;
  const double t_max = pose.radius_m + 0.5;
  constexpr double kAmbient = 0.25;

  RenderOutput out;
  out.frame.rgb = ImageRgb8(options.width, options.height, scene.background);
  out.frame.depth = ImageU8(options.width, options.height, 0);
  out.frame.pose = pose;
  out.object_id = ImageU8(options.width, options.height, 0);

  for (int py = 0; py < options.height; ++py) {
    const double sy = (static_cast<double>(options.height) / 2.0 - (py + 0.5)) / fpx;
    for (int px = 0; px < options.width; ++px) {
      const double sx = ((px + 0.5) - static_cast<double>(options.width) / 2.0) / fpx;
      const Vec3 dir = normalized(basis.forward + sx * basis.right + sy * basis.up);
      const auto hit = detail::trace(scene, pose.position, dir, t_max);
      if (!hit.hit) continue;
      const Vec3 p = pose.position + hit.t * dir;
      const double planar_depth = dot(p - pose.position, basis.forward);
      const Vec3 n = detail::scene_normal(scene, p);
      const double lambert = std::max(0.0, dot(n, -dir));
      const double intensity = kAmbient + (1.0 - kAmbient) * lambert;
      const Rgb8 base = scene.objects[hit.object].color;
      auto shade = [&](std::uint8_t c) {
        return static_cast<std::uint8_t>(std::floor(intensity * c + 0.5));
      };
      out.frame.rgb.at(px, py) = {shade(base.r), shade(base.g), shade(base.b)};
      out.frame.depth.at(px, py) = depth_quantize(planar_depth, mapping);
      out.object_id.at(px, py) = static_cast<std::uint8_t>(hit.object + 1);
    }
  }
  return out;
}

inline Frame render_view(const SceneSpec& scene, const viewgeom::CameraPose& pose,
                         const RenderOptions& options, const DepthMapping& mapping) {
  return render_with_ids(scene, pose, options, mapping).frame;
}

/// Planar depth of an object's center from the given pose.
inline double object_center_depth(const SceneSpec& scene, const viewgeom::CameraPose& pose,
                                  std::size_t index) {
  if (index >= scene.objects.size()) throw ConfigError("object index out of range");
  return dot(scene.objects[index].center - pose.position, pose.forward);
}

namespace detail {

inline double bounding_radius(const Primitive& p) {
  switch (p.kind) {
    case ShapeKind::sphere: return p.radius;
    case ShapeKind::cube: return p.edge * std::sqrt(3.0) / 2.0;
    case ShapeKind::cone: {
      const double hh = p.height / 2.0;
      return std::sqrt(p.radius * p.radius + hh * hh);
    }
    case ShapeKind::torus: return p.radius + p.minor_radius;
  }
  return 0.0;
}

}  // namespace detail

/// Projected bounding box of an object, padded by `pad` times its radius,
/// clamped to the image. Used as the default sharpness region.
inline PixelRect object_pixel_region(const SceneSpec& scene, const viewgeom::CameraPose& pose,
                                     const RenderOptions& options, std::size_t index,
                                     double pad = 1.0) {
  if (index >= scene.objects.size()) throw ConfigError("object index out of range");
  const auto& prim = scene.objects[index];
  const auto basis = viewgeom::camera_basis(pose);
  const Vec3 rel = prim.center - pose.position;
  const double depth = dot(rel, basis.forward);
  if (!(depth > 0.0)) throw ConfigError("object is behind the camera");
  const double tan_half = std::tan(options.hfov_deg * (3.141592653589793238462643383279502884 /
                                                       180.0) /
                                   2.0);
  const double fpx = (static_cast<double>(options.width) / 2.0) / tan_half;
  const double cx = static_cast<double>(options.width) / 2.0 + dot(rel, basis.right) / depth * fpx;
  const double cy = static_cast<double>(options.height) / 2.0 - dot(rel, basis.up) / depth * fpx;
  const double rpx = detail::bounding_radius(prim) * pad / depth * fpx;
  PixelRect rect;
  rect.x0 = std::clamp(static_cast<int>(std::floor(cx - rpx)), 0, options.width);
  rect.x1 = std::clamp(static_cast<int>(std::ceil(cx + rpx)), 0, options.width);
  rect.y0 = std::clamp(static_cast<int>(std::floor(cy - rpx)), 0, options.height);
  rect.y1 = std::clamp(static_cast<int>(std::ceil(cy + rpx)), 0, options.height);
  return rect;
}

/// Projected regions of the first two objects with any horizontal overlap
/// split at the midline, so per-object sharpness reads do not share pixels.
inline std::array<PixelRect, 2> object_pixel_regions_disjoint(
    const SceneSpec& scene, const viewgeom::CameraPose& pose, const RenderOptions& options,
    double pad = 1.0) {
  if (scene.objects.size() < 2) throw ConfigError("scene needs two objects for paired regions");
  PixelRect a = object_pixel_region(scene, pose, options, 0, pad);
  PixelRect b = object_pixel_region(scene, pose, options, 1, pad);
  if (a.x1 > b.x0 && b.x1 > a.x0) {
    const int mid = ((a.x0 + a.x1) / 2 + (b.x0 + b.x1) / 2) / 2;
    if ((a.x0 + a.x1) / 2 <= (b.x0 + b.x1) / 2) {
      a.x1 = std::min(a.x1, mid);
      b.x0 = std::max(b.x0, mid);
    } else {
      b.x1 = std::min(b.x1, mid);
      a.x0 = std::max(a.x0, mid);
    }
  }
  return {a, b};
}

}  // namespace holosweep::scenegen
