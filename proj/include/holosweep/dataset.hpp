#pragma once

#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include "holosweep/io.hpp"
#include "holosweep/parallel.hpp"
#include "holosweep/scene.hpp"
#include "holosweep/viewgeom.hpp"

namespace holosweep::scenegen {

namespace fs = std::filesystem;

struct DatasetViewRef {
  int index = 0;
  double angle_deg = 0.0;
  std::string dir;  // relative to the shape root
};

struct DatasetManifest {
  std::string shape;
  int view_count = 0;
  int width = 0;
  int height = 0;
  double radius_m = viewgeom::kDefaultTrackRadiusM;
  double hfov_deg = 60.0;
  DepthMapping mapping;
  std::vector<DatasetViewRef> views;
};

inline fs::path shape_root(const fs::path& root, const std::string& shape) {
  return root / shape;
}

inline fs::path view_dir(const fs::path& root, const std::string& shape, int index) {
  return shape_root(root, shape) / ("view_" + std::to_string(index));
}

namespace detail {

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline nlohmann::json mapping_json(const DepthMapping& m) {
  return {{"near_m", m.near_m}, {"far_m", m.far_m}};
}

inline DepthMapping mapping_from_json(const nlohmann::json& j) {
  DepthMapping m;
  m.near_m = j.at("near_m").get<double>();
  m.far_m = j.at("far_m").get<double>();
  return m;
}

}  // namespace detail

/// Renders view_count frames at angles k*(360/view_count) and writes the
/// on-disk dataset layout:
///   <root>/<shape>/view_<k>/{rgb.png, depth.pgm, meta.json}
///   <root>/<shape>/manifest.json
inline DatasetManifest generate_dataset(const SceneSpec& scene, int view_count,
                                        const fs::path& root, const RenderOptions& options,
                                        const DepthMapping& mapping,
                                        double radius_m = viewgeom::kDefaultTrackRadiusM,
                                        unsigned threads = 0) {
  if (!detail::is_power_of_two(view_count) || view_count > 1024)
    throw ConfigError("view count must be a power of two and at most 1024, got " +
                      std::to_string(view_count));
  validate_scene(scene, mapping, radius_m);

  const std::string shape = shape_name(scene.shape_kind);
  std::error_code ec;
  fs::create_directories(shape_root(root, shape), ec);
  if (ec) throw DataError("cannot create dataset directory " +
                          shape_root(root, shape).string() + ": " + ec.message());

  DatasetManifest manifest;
  manifest.shape = shape;
  manifest.view_count = view_count;
  manifest.width = options.width;
  manifest.height = options.height;
  manifest.radius_m = radius_m;
  manifest.hfov_deg = options.hfov_deg;
  manifest.mapping = mapping;
  manifest.views.resize(view_count);

  const double step = 360.0 / static_cast<double>(view_count);
  parallel_for(
      view_count,
      [&](int k) {
        const double angle = static_cast<double>(k) * step;
        const auto pose = viewgeom::camera_pose(angle, radius_m);
        const Frame frame = render_view(scene, pose, options, mapping);

        const fs::path dir = view_dir(root, shape, k);
        std::error_code dir_ec;
        fs::create_directories(dir, dir_ec);
        if (dir_ec)
          throw DataError("cannot create " + dir.string() + ": " + dir_ec.message());
        io::write_png_rgb8(dir / "rgb.png", frame.rgb);
        io::write_pgm(dir / "depth.pgm", frame.depth);
        io::write_json(dir / "meta.json",
                       {{"angle_deg", angle},
                        {"radius_m", radius_m},
                        {"resolution", {{"width", options.width}, {"height", options.height}}},
                        {"depth_mapping", detail::mapping_json(mapping)}});
        manifest.views[k] = {k, angle, "view_" + std::to_string(k)};
      },
      threads);

  nlohmann::json views_json = nlohmann::json::array();
  for (const auto& v : manifest.views)
    views_json.push_back({{"index", v.index}, {"angle_deg", v.angle_deg}, {"dir", v.dir}});
  io::write_json(shape_root(root, shape) / "manifest.json",
                 {{"shape", shape},
                  {"view_count", view_count},
                  {"resolution", {{"width", options.width}, {"height", options.height}}},
                  {"radius_m", radius_m},
                  {"hfov_deg", options.hfov_deg},
                  {"depth_mapping", detail::mapping_json(mapping)},
                  {"views", views_json}});
  return manifest;
}

inline DatasetManifest load_manifest(const fs::path& root, const std::string& shape) {
  const fs::path path = shape_root(root, shape) / "manifest.json";
  if (!fs::exists(path)) throw DataError("dataset manifest not found: " + path.string());
  const auto j = io::read_json(path);
  DatasetManifest m;
  try {
    m.shape = j.at("shape").get<std::string>();
    m.view_count = j.at("view_count").get<int>();
    m.width = j.at("resolution").at("width").get<int>();
    m.height = j.at("resolution").at("height").get<int>();
    m.radius_m = j.at("radius_m").get<double>();
    m.hfov_deg = j.value("hfov_deg", 60.0);
    m.mapping = detail::mapping_from_json(j.at("depth_mapping"));
    for (const auto& v : j.at("views"))
      m.views.push_back({v.at("index").get<int>(), v.at("angle_deg").get<double>(),
                         v.at("dir").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }
  if (static_cast<int>(m.views.size()) != m.view_count)
    throw DataError("manifest view list does not match view_count in " + path.string());
  return m;
}

/// Index of the dataset view at the given track angle.
inline int view_index_for_angle(const DatasetManifest& m, double angle_deg) {
  const double step = 360.0 / static_cast<double>(m.view_count);
  const int index = static_cast<int>(std::floor(angle_deg / step + 0.5));
  if (index < 0 || index >= m.view_count ||
      static_cast<double>(index) * step != angle_deg)
    throw DataError("dataset has no view at angle " + std::to_string(angle_deg));
  return index;
}

inline ImageU8 load_view_depth(const fs::path& root, const DatasetManifest& m, int index) {
  return io::read_pgm(view_dir(root, m.shape, index) / "depth.pgm");
}

inline Frame load_view(const fs::path& root, const DatasetManifest& m, int index) {
  const fs::path dir = view_dir(root, m.shape, index);
  Frame frame;
  frame.rgb = io::read_png_rgb8(dir / "rgb.png");
  frame.depth = io::read_pgm(dir / "depth.pgm");
  const auto meta = io::read_json(dir / "meta.json");
  frame.pose = viewgeom::camera_pose(meta.at("angle_deg").get<double>(),
                                     meta.at("radius_m").get<double>());
  if (!frame.rgb.same_size(frame.depth))
    throw DataError("rgb/depth resolution mismatch in " + dir.string());
  return frame;
}

}  // namespace holosweep::scenegen
