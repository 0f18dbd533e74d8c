#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <string>

#include "holosweep/holo.hpp"
#include "holosweep/io.hpp"

namespace holosweep::holo {

namespace fs = std::filesystem;

namespace detail {

inline constexpr std::array<const char*, 3> kChannelNames{"r", "g", "b"};

inline double channel_scale(const LeeChannel& lee) {
  double scale = 0.0;
  for (const auto* plane : {&lee.l1, &lee.l2, &lee.l3, &lee.l4})
    for (double v : plane->pixels()) scale = std::max(scale, v);
  return scale;
}

inline ImageU8 quantize_plane(const ImageF64& plane, double scale) {
  ImageU8 out(plane.width(), plane.height(), 0);
  if (scale > 0.0) {
    for (std::size_t i = 0; i < plane.pixels().size(); ++i)
      out.pixels()[i] =
          static_cast<std::uint8_t>(std::floor(plane.pixels()[i] / scale * 255.0 + 0.5));
  }
  return out;
}

inline ImageF64 dequantize_plane(const ImageU8& plane, double scale) {
  ImageF64 out(plane.width(), plane.height(), 0.0);
  for (std::size_t i = 0; i < plane.pixels().size(); ++i)
    out.pixels()[i] = static_cast<double>(plane.pixels()[i]) / 255.0 * scale;
  return out;
}

}  // namespace detail

/// Writes a Lee hologram as four 8-bit PGM planes per channel plus
/// lee_meta.json with the per-channel quantization scales and the optics.
inline void write_lee(const fs::path& dir, const LeeHologram& lee) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json scales;
  for (int c = 0; c < 3; ++c) {
    const auto& channel = lee.channels[c];
    const double scale = detail::channel_scale(channel);
    scales[detail::kChannelNames[c]] = scale;
    int plane_index = 1;
    for (const auto* plane : {&channel.l1, &channel.l2, &channel.l3, &channel.l4}) {
      const std::string name =
          std::string("lee_") + detail::kChannelNames[c] + "_l" + std::to_string(plane_index++) +
          ".pgm";
      io::write_pgm(dir / name, detail::quantize_plane(*plane, scale));
    }
  }
  io::write_json(dir / "lee_meta.json", {{"width", lee.width},
                                         {"height", lee.height},
                                         {"scales", scales},
                                         {"optics", optics_to_json(lee.optics)}});
}

inline LeeHologram read_lee(const fs::path& dir) {
  const auto meta = io::read_json(dir / "lee_meta.json");
  LeeHologram lee;
  try {
    lee.width = meta.at("width").get<int>();
    lee.height = meta.at("height").get<int>();
    lee.optics = optics_from_json(meta.at("optics"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed lee_meta.json in " + dir.string() + ": " + e.what());
  }
  for (int c = 0; c < 3; ++c) {
    const double scale = meta.at("scales").at(detail::kChannelNames[c]).get<double>();
    std::array<ImageF64, 4> planes;
    for (int k = 0; k < 4; ++k) {
      const std::string name =
          std::string("lee_") + detail::kChannelNames[c] + "_l" + std::to_string(k + 1) + ".pgm";
      const ImageU8 raw = io::read_pgm(dir / name);
      if (raw.width() != lee.width || raw.height() != lee.height)
        throw DataError("lee plane size mismatch in " + dir.string());
      planes[k] = detail::dequantize_plane(raw, scale);
    }
    lee.channels[c] = {std::move(planes[0]), std::move(planes[1]), std::move(planes[2]),
                       std::move(planes[3])};
  }
  return lee;
}

}  // namespace holosweep::holo
