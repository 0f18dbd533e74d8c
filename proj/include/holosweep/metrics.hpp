#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "holosweep/errors.hpp"
#include "holosweep/image.hpp"

namespace holosweep::metrics {

/// Mean squared error of two depth maps. `normalized` uses brightness in
/// [0, 1]; `byte_scale` is the same value on the 0..255 axis.
struct MseResult {
  double normalized = 0.0;
  double byte_scale = 0.0;
};

inline MseResult mse(const ImageU8& estimate, const ImageU8& truth) {
  if (!estimate.same_size(truth)) throw DataError("mse: resolution mismatch");
  double sum = 0.0;
  const auto& a = estimate.pixels();
  const auto& b = truth.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) / 255.0 - static_cast<double>(b[i]) / 255.0;
    sum += d * d;
  }
  const double normalized = sum / static_cast<double>(a.size());
  return {normalized, normalized * 255.0 * 255.0};
}

/// Normalized cross-correlation (cosine similarity) of two non-negative
/// brightness vectors. Defined as 1 when both are all-zero and 0 when exactly
/// one is, keeping "identical implies 1" universal.
inline double acc(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("acc: shape mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double value = dot / std::sqrt(na * nb);
  return value > 1.0 ? 1.0 : value;
}

namespace detail {

template <typename Pixel, typename Fn>
double acc_images(const Image<Pixel>& a, const Image<Pixel>& b, Fn&& terms) {
  if (!a.same_size(b)) throw DataError("acc: shape mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) terms(a.pixels()[i], b.pixels()[i], dot, na, nb);
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double value = dot / std::sqrt(na * nb);
  return value > 1.0 ? 1.0 : value;
}

}  // namespace detail

inline double acc(const ImageU8& a, const ImageU8& b) {
  return detail::acc_images(a, b, [](std::uint8_t x, std::uint8_t y, double& dot, double& na,
                                     double& nb) {
    const double xv = x;
    const double yv = y;
    dot += xv * yv;
    na += xv * xv;
    nb += yv * yv;
  });
}

inline double acc(const ImageF64& a, const ImageF64& b) {
  return detail::acc_images(a, b,
                            [](double x, double y, double& dot, double& na, double& nb) {
                              dot += x * y;
                              na += x * x;
                              nb += y * y;
                            });
}

/// Color variant summing over all three channels.
inline double acc(const ImageRgb8& a, const ImageRgb8& b) {
  return detail::acc_images(a, b, [](const Rgb8& x, const Rgb8& y, double& dot, double& na,
                                     double& nb) {
    dot += static_cast<double>(x.r) * y.r + static_cast<double>(x.g) * y.g +
           static_cast<double>(x.b) * y.b;
    na += static_cast<double>(x.r) * x.r + static_cast<double>(x.g) * x.g +
          static_cast<double>(x.b) * x.b;
    nb += static_cast<double>(y.r) * y.r + static_cast<double>(y.g) * y.g +
          static_cast<double>(y.b) * y.b;
  });
}

/// Training-time model: seconds per batch times batches times epochs.
struct TimeModel {
  double t_per_batch_s = 0.0;
  std::int64_t batches = 0;
  std::int64_t epochs = 0;
};

inline void validate_time_model(const TimeModel& m) {
  if (!(m.t_per_batch_s >= 0.0) || m.batches < 0 || m.epochs < 0)
    throw ConfigError("time model fields must be non-negative");
}

inline double training_time_s(const TimeModel& m) {
  return m.t_per_batch_s * static_cast<double>(m.batches * m.epochs);
}

}  // namespace holosweep::metrics
