#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

#include "holosweep/scene.hpp"
#include "holosweep/viewgeom.hpp"

using namespace holosweep;
using namespace holosweep::scenegen;

namespace {

const DepthMapping kMap{};  // default anchors: 0.11 m -> 255, 0.287 m -> 0

// closed-form ray/sphere intersection for oracle checks
std::optional<double> ray_sphere_t(const Vec3& origin, const Vec3& dir, const Vec3& center,
                                   double radius) {
  const Vec3 oc = origin - center;
  const double b = dot(oc, dir);
  const double c = dot(oc, oc) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) return std::nullopt;
  return t;
}

}  // namespace

TEST_CASE("depth quantization hits the table anchors", "[scene]") {
  CHECK(depth_quantize(0.11, kMap) == 255);
  CHECK(depth_quantize(0.287, kMap) == 0);
  // midpoint rounds half-up
  CHECK(depth_quantize((0.11 + 0.287) / 2.0, kMap) == 128);
}

TEST_CASE("depth quantization clamps outside the slab", "[scene]") {
  CHECK(depth_quantize(0.01, kMap) == 255);
  CHECK(depth_quantize(1.5, kMap) == 0);
}

TEST_CASE("depth quantization is monotone non-increasing in distance", "[scene]") {
  int prev = 255;
  for (int i = 0; i <= 2000; ++i) {
    const double d = 0.10 + 0.20 * i / 2000.0;
    const int b = depth_quantize(d, kMap);
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("invalid depth mapping is rejected", "[scene]") {
  CHECK_THROWS_AS(validate_mapping(DepthMapping{0.3, 0.1}), ConfigError);
  CHECK_THROWS_AS(validate_mapping(DepthMapping{0.0, 0.1}), ConfigError);
}

TEST_CASE("empty scene renders background with depth zero", "[scene]") {
  SceneSpec scene = SceneSpec::preset(ShapeKind::sphere);
  for (auto& o : scene.objects) o.enabled = false;  // test hook
  scene.background = {9, 10, 11};
  const auto frame = render_view(scene, viewgeom::camera_pose(30.0), {64, 48, 60.0}, kMap);
  for (const auto& px : frame.rgb.pixels()) CHECK(px == Rgb8{9, 10, 11});
  for (auto b : frame.depth.pixels()) CHECK(b == 0);
}

TEST_CASE("single sphere center pixel matches the closed-form depth", "[scene]") {
  SceneSpec scene;
  scene.shape_kind = ShapeKind::sphere;
  const double r = 0.025;
  scene.objects.push_back(Primitive::sphere({0, 0, 0}, r, {200, 60, 60}));

  const auto pose = viewgeom::camera_pose(0.0, 0.20);
  const RenderOptions options{255, 255, 60.0};  // odd size: center pixel is on-axis
  const auto frame = render_view(scene, pose, options, kMap);

  CHECK(frame.depth.at(127, 127) == depth_quantize(0.20 - r, kMap));

  // sampled pixels agree with the analytic ray/sphere oracle
  const auto basis = viewgeom::camera_basis(pose);
  const double fpx = (255.0 / 2.0) / std::tan(60.0 * 3.141592653589793 / 180.0 / 2.0);
  for (int py = 100; py <= 154; py += 9) {
    for (int px = 100; px <= 154; px += 9) {
      const double sx = ((px + 0.5) - 255.0 / 2.0) / fpx;
      const double sy = (255.0 / 2.0 - (py + 0.5)) / fpx;
      const Vec3 dir = normalized(basis.forward + sx * basis.right + sy * basis.up);
      const auto t = ray_sphere_t(pose.position, dir, {0, 0, 0}, r);
      if (!t) {
        CHECK(frame.depth.at(px, py) == 0);
        continue;
      }
      const double oracle_depth = dot(*t * dir, basis.forward);
      const double traced = (kMap.far_m - kMap.near_m) *
                                (255.0 - frame.depth.at(px, py)) / 255.0 +
                            kMap.near_m;
      // byte-quantized render vs analytic depth: within one byte step
      CHECK(std::fabs(traced - oracle_depth) <= (kMap.far_m - kMap.near_m) / 255.0);
    }
  }
}

TEST_CASE("track-axis torus renders identically at 0 and 90 degrees", "[scene]") {
  SceneSpec scene;
  scene.shape_kind = ShapeKind::torus;
  scene.objects.push_back(Primitive::torus({0, 0, 0}, 0.025, 0.01, Axis::z, {210, 90, 40}));
  const RenderOptions options{96, 96, 60.0};
  const auto a = render_view(scene, viewgeom::camera_pose(0.0), options, kMap);
  const auto b = render_view(scene, viewgeom::camera_pose(90.0), options, kMap);
  CHECK(a.rgb == b.rgb);
  CHECK(a.depth == b.depth);
}

TEST_CASE("re-rendering is bit-identical", "[scene]") {
  const auto scene = SceneSpec::preset(ShapeKind::cone);
  const auto pose = viewgeom::camera_pose(123.0);
  const RenderOptions options{80, 60, 60.0};
  const auto a = render_view(scene, pose, options, kMap);
  const auto b = render_view(scene, pose, options, kMap);
  CHECK(a.rgb == b.rgb);
  CHECK(a.depth == b.depth);
}

TEST_CASE("hit pixels carry object color, misses carry background", "[scene]") {
  const auto scene = SceneSpec::preset(ShapeKind::cube);
  const auto out =
      render_with_ids(scene, viewgeom::camera_pose(37.0), {128, 96, 60.0}, kMap);
  bool saw_hit = false;
  for (int y = 0; y < 96; ++y) {
    for (int x = 0; x < 128; ++x) {
      const bool hit = out.object_id.at(x, y) != 0;
      if (hit) {
        saw_hit = true;
        CHECK(out.frame.depth.at(x, y) > 0);
        CHECK(out.frame.rgb.at(x, y) != scene.background);
      } else {
        CHECK(out.frame.depth.at(x, y) == 0);
        CHECK(out.frame.rgb.at(x, y) == scene.background);
      }
    }
  }
  CHECK(saw_hit);
}

TEST_CASE("front and back objects occupy disjoint depth ranges at angle 0", "[scene]") {
  for (auto kind : {ShapeKind::torus, ShapeKind::cube, ShapeKind::cone, ShapeKind::sphere}) {
    const auto scene = SceneSpec::preset(kind);
    const auto out = render_with_ids(scene, viewgeom::camera_pose(0.0), {160, 120, 60.0}, kMap);
    int front_min = 256, front_max = -1, back_min = 256, back_max = -1;
    for (std::size_t i = 0; i < out.object_id.pixels().size(); ++i) {
      const int id = out.object_id.pixels()[i];
      const int b = out.frame.depth.pixels()[i];
      if (id == 1) {
        front_min = std::min(front_min, b);
        front_max = std::max(front_max, b);
      } else if (id == 2) {
        back_min = std::min(back_min, b);
        back_max = std::max(back_max, b);
      }
    }
    INFO(shape_name(kind));
    REQUIRE(front_max >= 0);
    if (kind == scene.shape_kind && kind == ShapeKind::torus) {
      // the bundled default scene: the back torus stays visible through the
      // front ring, and the byte histograms must not touch
      REQUIRE(back_max >= 0);
    }
    // solid presets may fully occlude the back object head-on; whenever back
    // pixels exist the ranges must stay disjoint
    if (back_max >= 0) CHECK(back_max < front_min);
  }
}

TEST_CASE("degenerate primitives are rejected", "[scene]") {
  SceneSpec scene;
  scene.objects.push_back(Primitive::sphere({0, 0, 0}, 0.0, {10, 10, 10}));
  CHECK_THROWS_AS(render_view(scene, viewgeom::camera_pose(0.0), {16, 16, 60.0}, kMap),
                  ConfigError);

  SceneSpec cone_scene;
  cone_scene.objects.push_back(Primitive::cone({0, 0, 0}, 0.02, -1.0, {10, 10, 10}));
  CHECK_THROWS_AS(validate_scene(cone_scene, kMap, 0.20), ConfigError);
}

TEST_CASE("objects overflowing the slab margin are rejected", "[scene]") {
  SceneSpec scene;
  scene.objects.push_back(Primitive::sphere({0, 0, 0}, 0.08, {10, 10, 10}));
  CHECK_THROWS_AS(validate_scene(scene, kMap, 0.20), ConfigError);
}

TEST_CASE("bundled presets satisfy the slab margin over the whole track", "[scene]") {
  for (auto kind : {ShapeKind::torus, ShapeKind::cube, ShapeKind::cone, ShapeKind::sphere})
    CHECK_NOTHROW(validate_scene(SceneSpec::preset(kind), kMap, 0.20));
}

TEST_CASE("object center depth follows the track geometry", "[scene]") {
  const auto scene = SceneSpec::preset(ShapeKind::sphere);
  const auto pose = viewgeom::camera_pose(0.0, 0.20);
  CHECK(object_center_depth(scene, pose, 0) == Approx(0.20 - 0.0415).epsilon(1e-12));
  CHECK(object_center_depth(scene, pose, 1) == Approx(0.20 + 0.0415).epsilon(1e-12));
  // at 90 degrees both objects sit at track distance
  const auto side = viewgeom::camera_pose(90.0, 0.20);
  CHECK(object_center_depth(scene, side, 0) == Approx(0.20).epsilon(1e-12));
  CHECK(object_center_depth(scene, side, 1) == Approx(0.20).epsilon(1e-12));
}

TEST_CASE("projected object regions cover the rendered silhouettes", "[scene]") {
  const auto scene = SceneSpec::preset(ShapeKind::cone);
  const auto pose = viewgeom::camera_pose(45.0);
  const RenderOptions options{160, 120, 60.0};
  const auto out = render_with_ids(scene, pose, options, kMap);
  for (std::size_t idx = 0; idx < 2; ++idx) {
    const auto rect = object_pixel_region(scene, pose, options, idx);
    REQUIRE_FALSE(rect.empty());
    for (int y = 0; y < options.height; ++y)
      for (int x = 0; x < options.width; ++x)
        if (out.object_id.at(x, y) == static_cast<int>(idx) + 1) {
          CHECK(x >= rect.x0);
          CHECK(x < rect.x1);
          CHECK(y >= rect.y0);
          CHECK(y < rect.y1);
        }
  }
}

TEST_CASE("the default render options produce 640x360 frames", "[scene]") {
  const auto scene = SceneSpec::preset(ShapeKind::sphere);
  const auto frame = render_view(scene, viewgeom::camera_pose(10.0), RenderOptions{}, kMap);
  CHECK(frame.width() == 640);
  CHECK(frame.height() == 360);
  // the near object spans very roughly a quarter of the image width
  int min_x = 640;
  int max_x = -1;
  for (int y = 0; y < 360; ++y)
    for (int x = 0; x < 640; ++x)
      if (frame.depth.at(x, y) > 0) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
      }
  REQUIRE(max_x >= 0);
  CHECK(max_x - min_x > 640 / 8);
  CHECK(max_x - min_x < 640 / 2);
}

TEST_CASE("disjoint region split leaves no shared pixels", "[scene]") {
  const auto scene = SceneSpec::preset(ShapeKind::cone);
  const auto pose = viewgeom::camera_pose(45.0);
  const RenderOptions options{256, 256, 60.0};
  const auto rects = object_pixel_regions_disjoint(scene, pose, options, 1.0);
  CHECK_FALSE(rects[0].empty());
  CHECK_FALSE(rects[1].empty());
  const bool overlap = rects[0].x1 > rects[1].x0 && rects[1].x1 > rects[0].x0;
  CHECK_FALSE(overlap);
}
