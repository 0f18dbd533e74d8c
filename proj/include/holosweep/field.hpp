#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "holosweep/errors.hpp"

namespace holosweep::holo {

/// A sampled complex wave field for one wavelength: the hologram function
/// H(x, y) on a grid with square pixels of pitch_m.
struct ComplexField {
  int width = 0;
  int height = 0;
  double wavelength_m = 0.0;
  double pitch_m = 0.0;
  std::vector<std::complex<double>> values;  // row-major

  ComplexField() = default;
  ComplexField(int w, int h, double wavelength, double pitch)
      : width(w),
        height(h),
        wavelength_m(wavelength),
        pitch_m(pitch),
        values(static_cast<std::size_t>(w) * h) {
    if (w <= 0 || h <= 0) throw ConfigError("field dimensions must be positive");
    if (!(wavelength > 0.0) || !(pitch > 0.0))
      throw ConfigError("wavelength and pixel pitch must be positive");
  }

  std::complex<double>& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  const std::complex<double>& at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }

  bool same_grid(const ComplexField& o) const {
    return width == o.width && height == o.height && wavelength_m == o.wavelength_m &&
           pitch_m == o.pitch_m;
  }
};

inline bool all_finite(const ComplexField& f) {
  for (const auto& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline void require_finite(const ComplexField& f, const char* where) {
  if (!all_finite(f)) throw NumericError(std::string("non-finite field values in ") + where);
}

/// Total energy sum |v|^2 over the grid.
inline double field_energy(const ComplexField& f) {
  double e = 0.0;
  for (const auto& v : f.values) e += std::norm(v);
  return e;
}

/// Relative L2 distance ||a-b|| / ||b||; returns absolute norm when b is zero.
inline double relative_l2(const ComplexField& a, const ComplexField& b) {
  if (a.width != b.width || a.height != b.height)
    throw DataError("relative_l2: field shapes differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace holosweep::holo
