#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "holosweep/errors.hpp"
#include "holosweep/holo.hpp"
#include "holosweep/image.hpp"
#include "holosweep/io.hpp"
#include "holosweep/parallel.hpp"
#include "holosweep/propagate.hpp"

namespace holosweep::recon {

/// Numerically refocused image: per-channel field magnitude after
/// back-propagating the hologram by the focus distance.
struct Reconstruction {
  ImageF64 r, g, b;
  double focus_distance_m = 0.0;

  int width() const { return r.width(); }
  int height() const { return r.height(); }
};

namespace detail {

inline void check_focus(const holo::OpticsConfig& optics, double focus_m) {
  if (!(focus_m >= optics.z_near_m / 2.0) || !(focus_m <= 2.0 * optics.z_far_m))
    throw ConfigError("focus distance " + std::to_string(focus_m) +
                      " m outside [z_near/2, 2*z_far]");
}

inline ImageF64 magnitude(const holo::ComplexField& field) {
  ImageF64 img(field.width, field.height, 0.0);
  for (std::size_t i = 0; i < field.values.size(); ++i)
    img.pixels()[i] = std::abs(field.values[i]);
  return img;
}

}  // namespace detail

inline Reconstruction reconstruct(const std::array<holo::ComplexField, 3>& fields,
                                  double focus_m, const holo::OpticsConfig& optics) {
  detail::check_focus(optics, focus_m);
  Reconstruction out;
  out.focus_distance_m = focus_m;
  ImageF64* planes[3] = {&out.r, &out.g, &out.b};
  for (int c = 0; c < 3; ++c) {
    const auto back = holo::propagate(fields[c], -focus_m);
    holo::require_finite(back, "reconstruct");
    *planes[c] = detail::magnitude(back);
  }
  return out;
}

inline Reconstruction reconstruct(const holo::LeeHologram& lee, double focus_m) {
  return reconstruct(holo::lee_decode_rgb(lee), focus_m, lee.optics);
}

/// Rec. 709 luma of a reconstruction.
inline ImageF64 luminance(const Reconstruction& rec) {
  ImageF64 out(rec.width(), rec.height(), 0.0);
  for (std::size_t i = 0; i < out.pixels().size(); ++i)
    out.pixels()[i] = 0.2126 * rec.r.pixels()[i] + 0.7152 * rec.g.pixels()[i] +
                      0.0722 * rec.b.pixels()[i];
  return out;
}

/// Tenengrad sharpness: mean squared Sobel gradient magnitude over a region,
/// with clamped sampling at image borders.
inline double sharpness(const ImageF64& image, const PixelRect& region) {
  if (region.empty()) throw ConfigError("sharpness: empty region");
  if (region.x0 < 0 || region.y0 < 0 || region.x1 > image.width() ||
      region.y1 > image.height())
    throw ConfigError("sharpness: region outside image bounds");
  auto sample = [&](int x, int y) {
    x = std::clamp(x, 0, image.width() - 1);
    y = std::clamp(y, 0, image.height() - 1);
    return image.at(x, y);
  };
  double sum = 0.0;
  for (int y = region.y0; y < region.y1; ++y) {
    for (int x = region.x0; x < region.x1; ++x) {
      const double gx = (sample(x + 1, y - 1) + 2.0 * sample(x + 1, y) + sample(x + 1, y + 1)) -
                        (sample(x - 1, y - 1) + 2.0 * sample(x - 1, y) + sample(x - 1, y + 1));
      const double gy = (sample(x - 1, y + 1) + 2.0 * sample(x, y + 1) + sample(x + 1, y + 1)) -
                        (sample(x - 1, y - 1) + 2.0 * sample(x, y - 1) + sample(x + 1, y - 1));
      sum += gx * gx + gy * gy;
    }
  }
  return sum / (static_cast<double>(region.width()) * region.height());
}

inline double sharpness(const Reconstruction& rec, const PixelRect& region) {
  return sharpness(luminance(rec), region);
}

struct FocusScanEntry {
  double distance_m = 0.0;
  double peak_amplitude = 0.0;              // max |amplitude| over all channels
  std::vector<double> region_sharpness;     // one value per requested region
};

/// Reconstructs at each distance and reports the global amplitude peak plus
/// Tenengrad sharpness per region. Distances are independent and evaluated in
/// parallel.
inline std::vector<FocusScanEntry> focus_scan(const std::array<holo::ComplexField, 3>& fields,
                                              const std::vector<double>& distances_m,
                                              const holo::OpticsConfig& optics,
                                              const std::vector<PixelRect>& regions = {},
                                              unsigned threads = 0) {
  if (distances_m.empty()) throw ConfigError("focus_scan: empty distance list");
  for (double d : distances_m) detail::check_focus(optics, d);
  std::vector<FocusScanEntry> entries(distances_m.size());
  parallel_for(
      static_cast<int>(distances_m.size()),
      [&](int i) {
        const double d = distances_m[static_cast<std::size_t>(i)];
        const Reconstruction rec = reconstruct(fields, d, optics);
        FocusScanEntry entry;
        entry.distance_m = d;
        for (const auto* plane : {&rec.r, &rec.g, &rec.b})
          for (double v : plane->pixels()) entry.peak_amplitude = std::max(entry.peak_amplitude, v);
        const ImageF64 luma = luminance(rec);
        for (const auto& region : regions)
          entry.region_sharpness.push_back(sharpness(luma, region));
        entries[static_cast<std::size_t>(i)] = std::move(entry);
      },
      threads);
  return entries;
}

inline std::vector<FocusScanEntry> focus_scan(const holo::LeeHologram& lee,
                                              const std::vector<double>& distances_m,
                                              const std::vector<PixelRect>& regions = {},
                                              unsigned threads = 0) {
  return focus_scan(holo::lee_decode_rgb(lee), distances_m, lee.optics, regions, threads);
}

/// Writes the reconstruction as an 8-bit PNG normalized to its amplitude
/// peak, with the normalization constant recorded in a JSON sidecar.
inline void write_reconstruction_png(const std::filesystem::path& path,
                                     const Reconstruction& rec) {
  double peak = 0.0;
  for (const auto* plane : {&rec.r, &rec.g, &rec.b})
    for (double v : plane->pixels()) peak = std::max(peak, v);
  ImageRgb8 img(rec.width(), rec.height());
  const double scale = peak > 0.0 ? 255.0 / peak : 0.0;
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    auto to_byte = [&](double v) {
      return static_cast<std::uint8_t>(std::floor(std::min(v * scale, 255.0) + 0.5));
    };
    img.pixels()[i] = {to_byte(rec.r.pixels()[i]), to_byte(rec.g.pixels()[i]),
                       to_byte(rec.b.pixels()[i])};
  }
  io::write_png_rgb8(path, img);
  std::filesystem::path sidecar = path;
  sidecar.replace_extension(".json");
  io::write_json(sidecar,
                 {{"normalization_peak", peak}, {"focus_distance_m", rec.focus_distance_m}});
}

/// CSV with one row per scan distance; the first two regions map onto the
/// sharpness_front / sharpness_back columns.
inline void write_focus_scan_csv(const std::filesystem::path& path,
                                 const std::vector<FocusScanEntry>& entries) {
  std::ostringstream out;
  out << "distance_m,sharpness_front,sharpness_back\n";
  out.precision(17);
  for (const auto& e : entries) {
    out << e.distance_m;
    for (int r = 0; r < 2; ++r) {
      out << ",";
      if (r < static_cast<int>(e.region_sharpness.size())) out << e.region_sharpness[r];
    }
    out << "\n";
  }
  io::write_text(path, out.str());
}

}  // namespace holosweep::recon
