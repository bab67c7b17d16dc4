#pragma once

#include <span>
#include <vector>

#include "itc/greens.hpp"
#include "itc/params.hpp"

namespace itc::analysis {

/// Matsubara coefficients of a sampled imaginary-time series,
/// c_n = (beta/M) sum_j f(tau_j) e^{i omega_n tau_j}, for the M indices
/// n = -M/2 .. M/2 - 1 (position p holds n = p - M/2).
std::vector<cplx> matsubara_coefficients(std::span<const cplx> series, double beta, Statistics s);

struct PeakOptions {
  /// Non-resonant modes next to an exceptional point or just outside the
  /// band reach ~95x the median; grid-resolved resonances start near 120x.
  double threshold = 100.0;
  /// Only modes with |omega_n| <= window enter the median and the peak
  /// search. Non-positive: 4 max|eps - mu| + 2 pi / beta.
  double window = 0.0;
};

struct PeakReport {
  std::vector<int> modes;        ///< n_M inside the window, ascending
  std::vector<double> profile;   ///< max |c_n| over all contributing series
  double median = 0.0;           ///< median of profile
  double window = 0.0;
  std::vector<int> peaks;        ///< n_M with profile > threshold * median

  /// n_M of the largest profile value.
  int dominant() const;
};

/// Peak analysis of the imaginary-time tensor `g` (Domain::SpaceTau).
/// Periodic-chain tensors (x = r) are transformed back to momentum so that
/// every (i, j, k) series contributes; open-chain tensors use every
/// (i, j, cell) series.
PeakReport dominant_modes(const greens::GreensTensor& g, const PeakOptions& opts = {});

/// Peak analysis of one (i, j, x) series of `g` without any transform.
PeakReport dominant_modes(const greens::GreensTensor& g, int i, int j, int x,
                          const PeakOptions& opts = {});

/// Least-squares slope of log|g(t)| over t_lo <= t <= t_hi.
double log_growth_rate(std::span<const double> t, std::span<const cplx> g, double t_lo, double t_hi);

struct OscillationOptions {
  double tail_start = 2.0;  ///< analyse beta >= tail_start
  int samples = 256;        ///< uniform resampling points
  int detrend_degree = 2;
  double threshold = 10.0;
  int min_bin = 3;          ///< bins below this count as zero frequency (detrend leakage)
};

struct OscillationSpectrum {
  std::vector<double> frequency;  ///< angular frequency in beta
  std::vector<double> magnitude;
  double median = 0.0;
  std::vector<double> peaks;      ///< local maxima above threshold * median

  bool has_peak() const { return !peaks.empty(); }
};

/// Spectrum of y(beta) on the tail of a (possibly non-uniform) increasing
/// grid: cubic Hermite resampling, polynomial detrending, Hann window, FFT.
/// Bin spacing is 2 pi / (beta_max - tail_start); a period longer than about
/// half the tail is not resolved.
OscillationSpectrum oscillation_spectrum(std::span<const double> beta, std::span<const double> y,
                                         const OscillationOptions& opts = {});

}  // namespace itc::analysis
