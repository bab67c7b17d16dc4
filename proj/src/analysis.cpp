#include "itc/analysis.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "itc/fourier.hpp"
#include "itc/model.hpp"

namespace itc::analysis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

// slope at node i from the parabola through its neighbours
double node_slope(std::span<const double> x, std::span<const double> y, std::size_t i) {
  if (i == 0) return (y[1] - y[0]) / (x[1] - x[0]);
  if (i + 1 == x.size()) return (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
  const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
  const double d0 = (y[i] - y[i - 1]) / h0, d1 = (y[i + 1] - y[i]) / h1;
  return (h1 * d0 + h0 * d1) / (h0 + h1);
}

// cubic Hermite interpolation on [x[seg], x[seg+1]]
double hermite(std::span<const double> x, std::span<const double> y, std::size_t seg, double at) {
  const double h = x[seg + 1] - x[seg];
  const double t = (at - x[seg]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y[seg] + (t3 - 2 * t2 + t) * h * node_slope(x, y, seg) +
         (-2 * t3 + 3 * t2) * y[seg + 1] + (t3 - t2) * h * node_slope(x, y, seg + 1);
}

double auto_window(const greens::GreensMetadata& meta) {
  double reach = 0.0;
  for (cplx e : model::spectrum(meta.params)) reach = std::max(reach, std::abs(e - meta.mu));
  return 4.0 * reach + 2.0 * kPi / meta.params.beta;
}

// Running max of |c_n| over many series, for the modes inside the window.
class PeakCollector {
 public:
  PeakCollector(int m, double beta, Statistics s, double window) : beta_(beta), stat_(s) {
    for (int p = 0; p < m; ++p) {
      const int n = p - m / 2;
      if (std::abs(greens::matsubara_frequency(beta, s, n)) <= window) positions_.push_back(p);
    }
    report_.window = window;
    for (int p : positions_) report_.modes.push_back(greens::matsubara_mode(s, p - m / 2));
    report_.profile.assign(positions_.size(), 0.0);
  }

  void add(std::span<const cplx> series) {
    const auto c = matsubara_coefficients(series, beta_, stat_);
    for (std::size_t q = 0; q < positions_.size(); ++q) {
      const double v = std::abs(c[static_cast<std::size_t>(positions_[q])]);
      report_.profile[q] = std::max(report_.profile[q], v);
    }
  }

  PeakReport finish(double threshold) {
    report_.median = median_of(report_.profile);
    for (std::size_t q = 0; q < positions_.size(); ++q)
      if (report_.profile[q] > threshold * report_.median) report_.peaks.push_back(report_.modes[q]);
    return std::move(report_);
  }

 private:
  double beta_;
  Statistics stat_;
  std::vector<int> positions_;
  PeakReport report_;
};

void require_tau_domain(const greens::GreensTensor& g) {
  if (g.domain() != greens::Domain::SpaceTau)
    throw InvalidParameters("dominant_modes expects an imaginary-time tensor");
}

}  // namespace

std::vector<cplx> matsubara_coefficients(std::span<const cplx> series, double beta, Statistics s) {
  const int m = static_cast<int>(series.size());
  if (m < 2) throw InvalidParameters("matsubara_coefficients: need at least two samples");
  std::vector<cplx> work(series.begin(), series.end());
  if (s == Statistics::Fermion)
    for (int j = 0; j < m; ++j) work[static_cast<std::size_t>(j)] *= std::exp(kI * (kPi * j / m));
  fourier::transform(work, fourier::Direction::Backward);
  std::vector<cplx> out(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) {
    const int n = p - m / 2;
    out[static_cast<std::size_t>(p)] = work[static_cast<std::size_t>(((n % m) + m) % m)] * (beta / m);
  }
  return out;
}

int PeakReport::dominant() const {
  if (profile.empty()) throw InvalidParameters("PeakReport: empty profile");
  const auto it = std::max_element(profile.begin(), profile.end());
  return modes[static_cast<std::size_t>(it - profile.begin())];
}

PeakReport dominant_modes(const greens::GreensTensor& g, const PeakOptions& opts) {
  require_tau_domain(g);
  const auto& meta = g.meta();
  const double window = opts.window > 0.0 ? opts.window : auto_window(meta);
  PeakCollector collector(g.ns(), meta.params.beta, meta.params.statistics, window);
  const bool momentum = meta.params.boundary == Boundary::Periodic;
  const int nx = g.nx();

  std::vector<cplx> line(static_cast<std::size_t>(nx));
  std::vector<cplx> series(static_cast<std::size_t>(g.ns()));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (!momentum) {
        for (int x = 0; x < nx; ++x) collector.add(g.series(i, j, x));
        continue;
      }
      // G(k) = sum_r e^{-ikr} G(r), undoing G(r) = (1/N) sum_k e^{ikr} G(k).
      std::vector<cplx> gk(static_cast<std::size_t>(nx) * static_cast<std::size_t>(g.ns()));
      for (int s = 0; s < g.ns(); ++s) {
        for (int x = 0; x < nx; ++x) line[static_cast<std::size_t>(x)] = g(i, j, x, s);
        fourier::transform(line, fourier::Direction::Forward);
        for (int x = 0; x < nx; ++x)
          gk[static_cast<std::size_t>(x) * static_cast<std::size_t>(g.ns()) + static_cast<std::size_t>(s)] =
              line[static_cast<std::size_t>(x)];
      }
      for (int x = 0; x < nx; ++x)
        collector.add(std::span<const cplx>(gk).subspan(static_cast<std::size_t>(x) * static_cast<std::size_t>(g.ns()),
                                                        static_cast<std::size_t>(g.ns())));
    }
  return collector.finish(opts.threshold);
}

PeakReport dominant_modes(const greens::GreensTensor& g, int i, int j, int x, const PeakOptions& opts) {
  require_tau_domain(g);
  const auto& meta = g.meta();
  const double window = opts.window > 0.0 ? opts.window : auto_window(meta);
  PeakCollector collector(g.ns(), meta.params.beta, meta.params.statistics, window);
  collector.add(g.series(i, j, x));
  return collector.finish(opts.threshold);
}

double log_growth_rate(std::span<const double> t, std::span<const cplx> g, double t_lo, double t_hi) {
  if (t.size() != g.size()) throw InvalidParameters("log_growth_rate: size mismatch");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    const double y = std::log(std::abs(g[i]));
    if (!std::isfinite(y)) continue;
    n += 1;
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom <= 0.0) throw InvalidParameters("log_growth_rate: fewer than two usable points");
  return (n * sxy - sx * sy) / denom;
}

OscillationSpectrum oscillation_spectrum(std::span<const double> beta, std::span<const double> y,
                                         const OscillationOptions& opts) {
  if (beta.size() != y.size() || beta.size() < 4)
    throw InvalidParameters("oscillation_spectrum: need matching grids with >= 4 points");
  if (opts.samples < 8) throw InvalidParameters("oscillation_spectrum: samples must be >= 8");
  const double lo = std::max(opts.tail_start, beta.front());
  const double hi = beta.back();
  if (!(hi > lo)) throw InvalidParameters("oscillation_spectrum: empty tail");

  const int m = opts.samples;
  const double step = (hi - lo) / (m - 1);
  Eigen::VectorXd x(m), v(m);
  std::size_t seg = 0;
  for (int s = 0; s < m; ++s) {
    const double b = lo + step * s;
    while (seg + 2 < beta.size() && beta[seg + 1] < b) ++seg;
    x(s) = 2.0 * (b - lo) / (hi - lo) - 1.0;
    v(s) = hermite(beta, y, seg, b);
  }

  Eigen::MatrixXd basis(m, opts.detrend_degree + 1);
  for (int d = 0; d <= opts.detrend_degree; ++d) basis.col(d) = x.array().pow(d);
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(v);
  const Eigen::VectorXd residual = v - basis * coef;

  std::vector<cplx> work(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * kPi * s / (m - 1));
    work[static_cast<std::size_t>(s)] = residual(s) * hann;
  }
  fourier::transform(work, fourier::Direction::Forward);

  OscillationSpectrum out;
  const int bins = m / 2 + 1;
  for (int b = 0; b < bins; ++b) {
    out.frequency.push_back(2.0 * kPi * b / (step * m));
    out.magnitude.push_back(std::abs(work[static_cast<std::size_t>(b)]));
  }
  out.median = median_of(out.magnitude);
  for (int b = std::max(opts.min_bin, 1); b + 1 < bins; ++b) {
    const double c = out.magnitude[static_cast<std::size_t>(b)];
    if (c > out.magnitude[static_cast<std::size_t>(b - 1)] && c >= out.magnitude[static_cast<std::size_t>(b + 1)] &&
        c > opts.threshold * out.median)
      out.peaks.push_back(out.frequency[static_cast<std::size_t>(b)]);
  }
  return out;
}

}  // namespace itc::analysis
