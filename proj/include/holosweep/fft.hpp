#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace holosweep::fftutil {

enum class Direction { forward, inverse };

namespace detail {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int width, int height, Direction dir) {
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(width, height, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // Planned in place and unaligned so the plan can execute on any buffer
    // of the same shape. Plan creation is serialized; execution is not.
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(width) * height);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan =
        fftw_plan_dft_2d(height, width, ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, plan);
    return plan;
  }
};

inline PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace detail

/// In-place 2-D DFT on a row-major width x height grid. The inverse is
/// normalized by 1/(width*height) so forward followed by inverse is the
/// identity up to rounding.
inline void fft2_inplace(int width, int height, std::vector<std::complex<double>>& data,
                         Direction dir) {
  fftw_plan plan = detail::plan_cache().get(width, height, dir);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
  if (dir == Direction::inverse) {
    const double scale = 1.0 / (static_cast<double>(width) * static_cast<double>(height));
    for (auto& v : data) v *= scale;
  }
}

}  // namespace holosweep::fftutil
