#pragma once

#include <complex>
#include <span>

namespace itc::fourier {

enum class Direction {
  Forward,   ///< out_j = sum_n in_n e^{-2 pi i n j / M}
  Backward,  ///< out_j = sum_n in_n e^{+2 pi i n j / M}
};

/// Unnormalized in-place discrete Fourier transform (FFTW backed).
/// Safe to call from several threads at once.
void transform(std::span<std::complex<double>> data, Direction dir);

}  // namespace itc::fourier
