#include "itc/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace itc::fourier {

namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
// Plans are cached per (size, sign) and never destroyed.
fftw_plan cached_plan(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  auto* buffer = fftw_alloc_complex(static_cast<std::size_t>(n));
  fftw_plan plan = fftw_plan_dft_1d(n, buffer, buffer, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buffer);
  plans.emplace(key, plan);
  return plan;
}

}  // namespace

void transform(std::span<std::complex<double>> data, Direction dir) {
  if (data.empty()) return;
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(static_cast<int>(data.size()), sign), ptr, ptr);
}

}  // namespace itc::fourier
