#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "holosweep/fft.hpp"
#include "holosweep/field.hpp"

namespace holosweep::holo {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

namespace detail {

// FFT-order spatial frequency of bin i on an n-point grid with the given
// pitch, in cycles per meter.
inline double fft_frequency(int i, int n, double pitch) {
  const int k = i <= n / 2 ? i : i - n;
  return static_cast<double>(k) / (static_cast<double>(n) * pitch);
}

// Frequency cutoffs that keep the propagation kernel inside the grid
// (Matsushima-style band limit for the sampled transfer function).
inline double band_limit(double wavelength, double dfreq, double dz) {
  const double t = 2.0 * dfreq * std::fabs(dz);
  return 1.0 / (wavelength * std::sqrt(t * t + 1.0));
}

}  // namespace detail

/// Angular-spectrum transfer function for one propagation step, sampled in
/// FFT order. Evanescent components and frequencies beyond the band limit
/// are zeroed.
inline std::vector<std::complex<double>> transfer_function(int width, int height, double pitch,
                                                           double wavelength, double distance_m) {
  const double dfx = 1.0 / (static_cast<double>(width) * pitch);
  const double dfy = 1.0 / (static_cast<double>(height) * pitch);
  const double fx_limit = detail::band_limit(wavelength, dfx, distance_m);
  const double fy_limit = detail::band_limit(wavelength, dfy, distance_m);
  const double inv_lambda_sq = 1.0 / (wavelength * wavelength);

  std::vector<std::complex<double>> tf(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const double fy = detail::fft_frequency(y, height, pitch);
    const double fy_sq = fy * fy;
    const bool fy_ok = std::fabs(fy) <= fy_limit;
    for (int x = 0; x < width; ++x) {
      const double fx = detail::fft_frequency(x, width, pitch);
      std::complex<double> h(0.0, 0.0);
      if (fy_ok && std::fabs(fx) <= fx_limit) {
        const double radicand = inv_lambda_sq - fx * fx - fy_sq;
        if (radicand > 0.0)
          h = std::polar(1.0, 2.0 * kPi * distance_m * std::sqrt(radicand));
      }
      tf[static_cast<std::size_t>(y) * width + x] = h;
    }
  }
  return tf;
}

/// Propagates a field by a signed distance along the optical axis with the
/// band-limited angular spectrum method.
inline ComplexField propagate(const ComplexField& field, double distance_m) {
  if (field.values.empty()) throw ConfigError("cannot propagate an empty field");
  const auto tf =
      transfer_function(field.width, field.height, field.pitch_m, field.wavelength_m, distance_m);
  ComplexField out = field;
  fftutil::fft2_inplace(out.width, out.height, out.values, fftutil::Direction::forward);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= tf[i];
  fftutil::fft2_inplace(out.width, out.height, out.values, fftutil::Direction::inverse);
  return out;
}

}  // namespace holosweep::holo
