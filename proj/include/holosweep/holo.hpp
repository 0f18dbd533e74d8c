#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "holosweep/errors.hpp"
#include "holosweep/fft.hpp"
#include "holosweep/field.hpp"
#include "holosweep/image.hpp"
#include "holosweep/metrics.hpp"
#include "holosweep/propagate.hpp"
#include "holosweep/scene.hpp"

namespace holosweep::holo {

enum class PhaseMode { zero, seeded_random };

inline const char* phase_mode_name(PhaseMode m) {
  return m == PhaseMode::zero ? "zero" : "random";
}

inline PhaseMode parse_phase_mode(const std::string& name) {
  if (name == "zero") return PhaseMode::zero;
  if (name == "random" || name == "seeded-random") return PhaseMode::seeded_random;
  throw ConfigError("unknown phase mode: " + name);
}

/// Wavelengths, sampling, and layer geometry for hologram synthesis. Depth
/// byte 255 lands on z_near_m, byte 0 on z_far_m, with layer_count uniform
/// planes across the range.
struct OpticsConfig {
  std::array<double, 3> wavelengths_m{638e-9, 520e-9, 450e-9};
  double pixel_pitch_m = 8e-6;
  double z_near_m = 0.011;
  double z_far_m = 0.0287;
  int layer_count = 32;
  PhaseMode phase_mode = PhaseMode::seeded_random;
  std::uint32_t phase_seed = 42;

  bool operator==(const OpticsConfig&) const = default;

  void validate() const {
    for (double w : wavelengths_m)
      if (!(w > 0.0)) throw ConfigError("wavelengths must be positive");
    if (!(pixel_pitch_m > 0.0)) throw ConfigError("pixel pitch must be positive");
    if (!(z_near_m > 0.0) || !(z_near_m < z_far_m))
      throw ConfigError("optics require 0 < z_near_m < z_far_m");
    if (layer_count < 2) throw ConfigError("layer_count must be at least 2");
  }

  int layer_of_byte(std::uint8_t b) const {
    return static_cast<int>(
        std::floor(static_cast<double>(b) * (layer_count - 1) / 255.0 + 0.5));
  }

  double layer_distance(int layer) const {
    if (layer <= 0) return z_far_m;
    if (layer >= layer_count - 1) return z_near_m;
    return z_far_m + (static_cast<double>(layer) / static_cast<double>(layer_count - 1)) *
                         (z_near_m - z_far_m);
  }

  double layer_spacing() const {
    return (z_far_m - z_near_m) / static_cast<double>(layer_count - 1);
  }

  /// 4K preset: SLM-scale pitch at 3840x2160.
  static OpticsConfig preset_4k() {
    OpticsConfig o;
    o.pixel_pitch_m = 3.6e-6;
    return o;
  }
};

inline nlohmann::json optics_to_json(const OpticsConfig& o) {
  return {{"wavelengths_m", o.wavelengths_m},
          {"pixel_pitch_m", o.pixel_pitch_m},
          {"z_near_m", o.z_near_m},
          {"z_far_m", o.z_far_m},
          {"layer_count", o.layer_count},
          {"phase_mode", phase_mode_name(o.phase_mode)},
          {"seed", o.phase_seed}};
}

inline OpticsConfig optics_from_json(const nlohmann::json& j) {
  OpticsConfig o;
  try {
    if (j.contains("wavelengths_m")) {
      const auto w = j.at("wavelengths_m");
      if (!w.is_array() || w.size() != 3)
        throw ConfigError("wavelengths_m must be an array of three values");
      for (int i = 0; i < 3; ++i) o.wavelengths_m[i] = w[i].get<double>();
    }
    o.pixel_pitch_m = j.value("pixel_pitch_m", o.pixel_pitch_m);
    o.z_near_m = j.value("z_near_m", o.z_near_m);
    o.z_far_m = j.value("z_far_m", o.z_far_m);
    o.layer_count = j.value("layer_count", o.layer_count);
    if (j.contains("phase_mode"))
      o.phase_mode = parse_phase_mode(j.at("phase_mode").get<std::string>());
    o.phase_seed = j.value("seed", o.phase_seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed optics config: ") + e.what());
  }
  o.validate();
  return o;
}

/// Initial phase per pixel in [0, 2pi). The grid depends only on shape, mode,
/// and seed, so holograms synthesized from different depth estimates of the
/// same view share it and stay comparable.
inline ImageF64 phase_grid(int width, int height, PhaseMode mode, std::uint32_t seed) {
  ImageF64 grid(width, height, 0.0);
  if (mode == PhaseMode::seeded_random) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * kPi);
    for (auto& v : grid.pixels()) v = uniform(rng);
  }
  return grid;
}

// ------------------------------------------------------------- Lee codec

/// Four non-negative coefficient planes for one color channel, on the phase
/// basis {1, i, -1, -i}.
struct LeeChannel {
  ImageF64 l1, l2, l3, l4;

  int width() const { return l1.width(); }
  int height() const { return l1.height(); }
};

/// Canonical decomposition H = (L1 - L3) + i(L2 - L4) with at most one of
/// each pair nonzero per pixel.
inline LeeChannel lee_encode(const ComplexField& field) {
  LeeChannel lee;
  lee.l1 = ImageF64(field.width, field.height, 0.0);
  lee.l2 = ImageF64(field.width, field.height, 0.0);
  lee.l3 = ImageF64(field.width, field.height, 0.0);
  lee.l4 = ImageF64(field.width, field.height, 0.0);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double re = field.values[i].real();
    const double im = field.values[i].imag();
    lee.l1.pixels()[i] = std::max(re, 0.0);
    lee.l3.pixels()[i] = std::max(-re, 0.0);
    lee.l2.pixels()[i] = std::max(im, 0.0);
    lee.l4.pixels()[i] = std::max(-im, 0.0);
  }
  return lee;
}

inline ComplexField lee_decode(const LeeChannel& lee, double wavelength_m, double pitch_m) {
  if (!lee.l1.same_size(lee.l2) || !lee.l1.same_size(lee.l3) || !lee.l1.same_size(lee.l4))
    throw DataError("lee_decode: plane sizes differ");
  for (const auto* plane : {&lee.l1, &lee.l2, &lee.l3, &lee.l4})
    for (double v : plane->pixels())
      if (!(v >= 0.0)) throw DataError("lee_decode: negative plane value");
  ComplexField field(lee.width(), lee.height(), wavelength_m, pitch_m);
  for (std::size_t i = 0; i < field.values.size(); ++i)
    field.values[i] = {lee.l1.pixels()[i] - lee.l3.pixels()[i],
                       lee.l2.pixels()[i] - lee.l4.pixels()[i]};
  return field;
}

/// Full-color Lee hologram: four planes per channel plus the optics that
/// produced it.
struct LeeHologram {
  OpticsConfig optics;
  int width = 0;
  int height = 0;
  std::array<LeeChannel, 3> channels;  // r, g, b
};

inline LeeHologram lee_encode_rgb(const std::array<ComplexField, 3>& fields,
                                  const OpticsConfig& optics) {
  LeeHologram lee;
  lee.optics = optics;
  lee.width = fields[0].width;
  lee.height = fields[0].height;
  for (int c = 0; c < 3; ++c) {
    if (fields[c].width != lee.width || fields[c].height != lee.height)
      throw DataError("lee_encode_rgb: channel resolutions differ");
    lee.channels[c] = lee_encode(fields[c]);
  }
  return lee;
}

inline std::array<ComplexField, 3> lee_decode_rgb(const LeeHologram& lee) {
  return {lee_decode(lee.channels[0], lee.optics.wavelengths_m[0], lee.optics.pixel_pitch_m),
          lee_decode(lee.channels[1], lee.optics.wavelengths_m[1], lee.optics.pixel_pitch_m),
          lee_decode(lee.channels[2], lee.optics.wavelengths_m[2], lee.optics.pixel_pitch_m)};
}

// ------------------------------------------------------------ synthesis

/// Layer-based hologram synthesis: depth bytes select one of layer_count
/// planes, each plane propagates to the hologram plane by its distance, and
/// the propagated fields sum per channel. Transfer grids are cached so sweeps
/// over many views reuse them.
class Synthesizer {
 public:
  explicit Synthesizer(OpticsConfig optics) : optics_(optics) { optics_.validate(); }

  const OpticsConfig& optics() const { return optics_; }

  std::array<ComplexField, 3> synthesize(const ImageRgb8& rgb, const ImageU8& depth) const {
    if (!rgb.same_size(depth)) throw DataError("synthesize: rgb/depth resolution mismatch");
    const int w = rgb.width();
    const int h = rgb.height();
    const std::size_t n = rgb.size();

    const ImageF64 phases = phase_grid(w, h, optics_.phase_mode, optics_.phase_seed);
    std::vector<std::complex<double>> rotors(n);
    for (std::size_t i = 0; i < n; ++i) rotors[i] = std::polar(1.0, phases.pixels()[i]);

    std::vector<int> layer_of(n);
    std::vector<char> layer_used(static_cast<std::size_t>(optics_.layer_count), 0);
    for (std::size_t i = 0; i < n; ++i) {
      layer_of[i] = optics_.layer_of_byte(depth.pixels()[i]);
      layer_used[layer_of[i]] = 1;
    }

    std::array<ComplexField, 3> out;
    std::vector<std::complex<double>> source(n);
    std::vector<std::complex<double>> spectrum(n);
    for (int c = 0; c < 3; ++c) {
      const double wavelength = optics_.wavelengths_m[c];
      ComplexField field(w, h, wavelength, optics_.pixel_pitch_m);
      std::fill(spectrum.begin(), spectrum.end(), std::complex<double>(0.0, 0.0));
      bool any = false;
      for (int layer = 0; layer < optics_.layer_count; ++layer) {
        if (!layer_used[layer]) continue;
        bool nonzero = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (layer_of[i] == layer) {
            const double amp = channel_amplitude(rgb.pixels()[i], c);
            source[i] = amp == 0.0 ? std::complex<double>(0.0, 0.0) : amp * rotors[i];
            nonzero = nonzero || amp != 0.0;
          } else {
            source[i] = {0.0, 0.0};
          }
        }
        if (!nonzero) continue;
        any = true;
        fftutil::fft2_inplace(w, h, source, fftutil::Direction::forward);
        const auto tf = transfer(w, h, wavelength, optics_.layer_distance(layer));
        for (std::size_t i = 0; i < n; ++i) spectrum[i] += source[i] * (*tf)[i];
      }
      if (any) {
        field.values = spectrum;
        fftutil::fft2_inplace(w, h, field.values, fftutil::Direction::inverse);
      }
      require_finite(field, "synthesize");
      out[c] = std::move(field);
    }
    return out;
  }

  std::array<ComplexField, 3> synthesize(const scenegen::Frame& frame) const {
    return synthesize(frame.rgb, frame.depth);
  }

 private:
  static double channel_amplitude(const Rgb8& px, int channel) {
    const std::uint8_t v = channel == 0 ? px.r : channel == 1 ? px.g : px.b;
    return static_cast<double>(v) / 255.0;
  }

  using TfPtr = std::shared_ptr<const std::vector<std::complex<double>>>;

  TfPtr transfer(int w, int h, double wavelength, double distance) const {
    // Keep the full per-layer grid set only while it fits a fixed budget;
    // large grids (4K) are recomputed per call instead.
    const std::size_t full_set_bytes = static_cast<std::size_t>(w) * h *
                                       sizeof(std::complex<double>) * 3 *
                                       static_cast<std::size_t>(optics_.layer_count);
    const bool cacheable = full_set_bytes <= (std::size_t{512} << 20);
    if (cacheable) {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      const auto key = std::make_tuple(w, h, wavelength, distance);
      auto it = tf_cache_.find(key);
      if (it != tf_cache_.end()) return it->second;
    }
    auto tf = std::make_shared<std::vector<std::complex<double>>>(
        transfer_function(w, h, optics_.pixel_pitch_m, wavelength, distance));
    if (cacheable) {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      tf_cache_.emplace(std::make_tuple(w, h, wavelength, distance), tf);
    }
    return tf;
  }

  OpticsConfig optics_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, int, double, double>, TfPtr> tf_cache_;
};

inline std::array<ComplexField, 3> synthesize(const scenegen::Frame& frame,
                                              const OpticsConfig& optics) {
  return Synthesizer(optics).synthesize(frame);
}

inline std::array<ComplexField, 3> synthesize(const ImageRgb8& rgb, const ImageU8& depth,
                                              const OpticsConfig& optics) {
  return Synthesizer(optics).synthesize(rgb, depth);
}

}  // namespace holosweep::holo

namespace holosweep::metrics {

/// CGH accuracy: cosine similarity over the stacked Lee brightness planes of
/// all channels.
inline double cgh_acc(const holo::LeeHologram& pred, const holo::LeeHologram& truth) {
  if (!(pred.optics == truth.optics)) throw DataError("cgh_acc: optics mismatch");
  if (pred.width != truth.width || pred.height != truth.height)
    throw DataError("cgh_acc: resolution mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto& pc = pred.channels[c];
    const auto& tc = truth.channels[c];
    for (const auto& pair : {std::pair{&pc.l1, &tc.l1}, std::pair{&pc.l2, &tc.l2},
                             std::pair{&pc.l3, &tc.l3}, std::pair{&pc.l4, &tc.l4}}) {
      const auto& a = pair.first->pixels();
      const auto& b = pair.second->pixels();
      if (a.size() != b.size()) throw DataError("cgh_acc: plane size mismatch");
      for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
    }
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double value = dot / std::sqrt(na * nb);
  return value > 1.0 ? 1.0 : value;
}

}  // namespace holosweep::metrics
