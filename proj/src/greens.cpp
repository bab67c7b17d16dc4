#include "itc/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "itc/fourier.hpp"
#include "itc/model.hpp"
#include "itc/parallel.hpp"

namespace itc::greens {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

int wrap(int n, int m) {
  const int r = n % m;
  return r < 0 ? r + m : r;
}

// Closed-form sums (1/beta) sum_n e^{-i w_n tau} / (-i w_n)^p for p = 1, 2,
// bosonic n = 0 excluded, tau in [0, beta) with tau = 0 read as 0+.
double tail_sum_first(Statistics s, double tau, double beta) {
  return s == Statistics::Fermion ? 0.5 : 0.5 - tau / beta;
}

double tail_sum_second(Statistics s, double tau, double beta) {
  if (s == Statistics::Fermion) return 0.5 * tau - 0.25 * beta;
  return 0.5 * tau - tau * tau / (2.0 * beta) - beta / 12.0;
}

// Accumulates a truncated Matsubara series into M bins and resolves it on the
// tau grid with one FFT: G(tau_j) = (1/beta) sum_n e^{-i w_n tau_j} a_n.
class MatsubaraFold {
 public:
  MatsubaraFold(int entries, int tau_points)
      : m_(tau_points), bins_(static_cast<std::size_t>(entries),
                              std::vector<cplx>(static_cast<std::size_t>(tau_points))) {}

  void add(int entry, int n, cplx value) {
    bins_[static_cast<std::size_t>(entry)][static_cast<std::size_t>(wrap(n, m_))] += value;
  }

  std::vector<cplx> resolve(int entry, Statistics s, double beta) {
    auto& data = bins_[static_cast<std::size_t>(entry)];
    fourier::transform(data, fourier::Direction::Forward);
    for (int j = 0; j < m_; ++j) {
      cplx v = data[static_cast<std::size_t>(j)] / beta;
      if (s == Statistics::Fermion) v *= std::exp(-kI * (kPi * j / m_));
      data[static_cast<std::size_t>(j)] = v;
    }
    return data;
  }

 private:
  int m_;
  std::vector<std::vector<cplx>> bins_;
};

double tail_error_estimate(const ImagTimeOptions& opts, double beta, double norm_a) {
  const double n = opts.n_max;
  if (opts.tail_correction) return norm_a * norm_a * beta * beta / (8.0 * kPi * kPi * kPi * n * n);
  const double omega_max = 2.0 * kPi * n / beta;
  const double tau1 = beta / opts.tau_points;
  return 1.0 / (kPi * omega_max * tau1) + norm_a * beta / (2.0 * kPi * kPi * n);
}

void check_options(const ImagTimeOptions& opts) {
  if (opts.n_max < 1) throw InvalidParameters("n_max must be >= 1");
  if (opts.tau_points < 2) throw InvalidParameters("tau_points must be >= 2");
}

// max |a - b| skipping tau = 0 when the raw series is used (it converges to
// the midpoint of the jump there rather than to 0+).
double deviation(const GreensTensor& a, const GreensTensor& b, bool skip_origin) {
  if (!skip_origin) return a.max_abs_difference(b);
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int x = 0; x < a.nx(); ++x)
        for (int s = 1; s < a.ns(); ++s) worst = std::max(worst, std::abs(a(i, j, x, s) - b(i, j, x, s)));
  return worst;
}

// Rounding of one Matsubara term: each inverse carries a relative error of
// about eps * cond, cond ~ (|omega| + |A|) |G_n|.
double rounding_term(double omega, double norm_a, double g_max) {
  return std::numeric_limits<double>::epsilon() * (std::abs(omega) + norm_a) * g_max * g_max;
}

void finalize(ImagTimeGreens& out, const ImagTimeOptions& opts, double beta, double norm_a,
              double rounding) {
  out.max_deviation = deviation(out.matsubara_sum, out.spectral, !opts.tail_correction);
  double scale = 0.0;
  for (cplx v : out.spectral.values()) scale = std::max(scale, std::abs(v));
  out.expected_error = tail_error_estimate(opts, beta, norm_a) + rounding / beta + 1e-12 * (1.0 + scale);
  out.converged = out.max_deviation <= 10.0 * out.expected_error;
  if (!out.converged) {
    const std::string msg = "ConvergenceWarning: Matsubara and spectral routes differ by " +
                            std::to_string(out.max_deviation) + " (expected " +
                            std::to_string(out.expected_error) + ")";
    out.matsubara_sum.meta().warnings.push_back(msg);
    out.spectral.meta().warnings.push_back(msg);
  }
}

// (1/N) sum_k e^{ikr} over the k index of every (i, j, s) series.
GreensTensor momentum_to_space(const GreensTensor& gk, GreensMetadata meta) {
  const int n = gk.nx();
  GreensTensor out(gk.domain(), n, gk.ns(), std::move(meta));
  std::vector<cplx> line(static_cast<std::size_t>(n));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int s = 0; s < gk.ns(); ++s) {
        for (int x = 0; x < n; ++x) line[static_cast<std::size_t>(x)] = gk(i, j, x, s);
        fourier::transform(line, fourier::Direction::Backward);
        for (int r = 0; r < n; ++r) out(i, j, r, s) = line[static_cast<std::size_t>(r)] / double(n);
      }
  return out;
}

}  // namespace

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::SpaceTau: return "space-tau";
    case Domain::MomentumMatsubara: return "momentum-matsubara";
    case Domain::SpaceRealTime: return "space-real-time";
  }
  return "unknown";
}

GreensTensor::GreensTensor(Domain domain, int nx, int ns, GreensMetadata meta)
    : domain_(domain), nx_(nx), ns_(ns), meta_(std::move(meta)),
      values_(4 * static_cast<std::size_t>(nx) * static_cast<std::size_t>(ns)) {
  if (nx <= 0 || ns <= 0) throw InvalidParameters("GreensTensor: empty shape");
}

double GreensTensor::max_abs_difference(const GreensTensor& other) const {
  if (nx_ != other.nx_ || ns_ != other.ns_)
    throw InvalidParameters("GreensTensor: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    worst = std::max(worst, std::abs(values_[i] - other.values_[i]));
  return worst;
}

std::vector<double> tau_grid(double beta, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) out[static_cast<std::size_t>(j)] = beta * j / points;
  return out;
}

ImagTimeGreens greens_imag_time(const ModelParams& params, const ImagTimeOptions& opts) {
  params.validate();
  check_options(opts);
  if (params.boundary == Boundary::Open) return greens_imag_time_obc(params, opts);

  const int nk = params.n_cells;
  const int m = opts.tau_points;
  const double beta = params.beta;
  const Statistics stat = params.statistics;
  const auto ks = model::k_grid(nk);
  const auto taus = tau_grid(beta, m);
  const double mu = chemical_potential(params);

  GreensMetadata meta;
  meta.params = params;
  meta.mu = mu;
  meta.x_label = "k";
  meta.x_axis = ks;
  meta.s_label = "tau";
  meta.s_axis = taus;
  for (double k : ks)
    if (spectral::near_exceptional_point(params, k)) meta.skipped_k.push_back(k);

  GreensTensor a_k(Domain::SpaceTau, nk, m, meta);
  GreensTensor b_k(Domain::SpaceTau, nk, m, meta);
  const double norm_a = params.gamma + params.t1 + params.t2 + std::abs(mu);
  std::vector<double> rounding(static_cast<std::size_t>(nk), 0.0);

#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int x = 0; x < nk; ++x) {
    const double k = ks[static_cast<std::size_t>(x)];
    if (spectral::near_exceptional_point(params, k)) continue;

    // Route (a): truncated Matsubara sum of the direct inverse.
    Eigen::Matrix2cd shifted = model::bloch_hamiltonian(params, k).matrix;
    shifted.diagonal().array() -= mu;
    MatsubaraFold fold(4, m);
    for (int n = -opts.n_max; n <= opts.n_max; ++n) {
      const double omega = matsubara_frequency(beta, stat, n);
      Eigen::Matrix2cd g = matsubara_block(params, k, mu, omega);
      rounding[static_cast<std::size_t>(x)] += rounding_term(omega, norm_a, g.cwiseAbs().maxCoeff());
      if (opts.tail_correction && omega != 0.0) {
        const cplx z = -kI * omega;
        g -= Eigen::Matrix2cd::Identity() / z;
        g += shifted / (z * z);
      }
      for (int e = 0; e < 4; ++e) fold.add(e, n, g(e / 2, e % 2));
    }
    for (int e = 0; e < 4; ++e) {
      const int i = e / 2;
      const int j = e % 2;
      const auto series = fold.resolve(e, stat, beta);
      for (int s = 0; s < m; ++s) {
        cplx v = series[static_cast<std::size_t>(s)];
        if (opts.tail_correction) {
          const double tau = taus[static_cast<std::size_t>(s)];
          v += (i == j ? tail_sum_first(stat, tau, beta) : 0.0) -
               shifted(i, j) * tail_sum_second(stat, tau, beta);
        }
        a_k(i, j, x, s) = v;
      }
    }

    // Route (b): sum_m phi_R phi_L^dagger g_m(tau).
    const auto sys = spectral::decompose_bloch(params, k);
    for (std::size_t mode = 0; mode < sys.size(); ++mode) {
      const cplx xi = sys.eigenvalues[mode] - mu;
      const Eigen::Matrix2cd p = sys.projector(mode);
      for (int s = 0; s < m; ++s) {
        const cplx w = mode_propagator(xi, taus[static_cast<std::size_t>(s)], beta, stat);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) b_k(i, j, x, s) += p(i, j) * w;
      }
    }
  }

  meta.x_label = "r";
  meta.x_axis.clear();
  for (int r = 0; r < nk; ++r) meta.x_axis.push_back(r);
  ImagTimeGreens out;
  meta.method = opts.tail_correction ? "matsubara-sum+tail" : "matsubara-sum";
  out.matsubara_sum = momentum_to_space(a_k, meta);
  meta.method = "spectral";
  out.spectral = momentum_to_space(b_k, meta);
  finalize(out, opts, beta, norm_a, *std::max_element(rounding.begin(), rounding.end()));
  return out;
}

ImagTimeGreens greens_imag_time_obc(const ModelParams& params, const ImagTimeOptions& opts) {
  params.validate();
  check_options(opts);
  if (params.boundary != Boundary::Open)
    throw InvalidParameters("greens_imag_time_obc requires open boundaries");
  if (params.statistics != Statistics::Fermion)
    throw InvalidParameters("greens_imag_time_obc is defined for fermions");

  const int cells = params.n_cells;
  const int dim = 2 * cells;
  const int m = opts.tau_points;
  const double beta = params.beta;
  const Statistics stat = params.statistics;
  const auto taus = tau_grid(beta, m);
  const Eigen::MatrixXcd h = model::open_hamiltonian(params).matrix;
  const auto sys = spectral::decompose(h);
  const double mu = chemical_potential(params, sys.eigenvalues);

  GreensMetadata meta;
  meta.params = params;
  meta.mu = mu;
  meta.x_label = "cell";
  for (int c = 0; c < cells; ++c) meta.x_axis.push_back(c);
  meta.s_label = "tau";
  meta.s_axis = taus;

  ImagTimeGreens out;
  meta.method = opts.tail_correction ? "matsubara-sum+tail" : "matsubara-sum";
  out.matsubara_sum = GreensTensor(Domain::SpaceTau, cells, m, meta);
  meta.method = "spectral";
  out.spectral = GreensTensor(Domain::SpaceTau, cells, m, meta);

  // Route (a): tridiagonal inverse per Matsubara frequency, local blocks only.
  std::vector<cplx> upper(static_cast<std::size_t>(dim - 1));
  std::vector<cplx> lower(static_cast<std::size_t>(dim - 1));
  for (int i = 0; i + 1 < dim; ++i) {
    upper[static_cast<std::size_t>(i)] = h(i, i + 1);
    lower[static_cast<std::size_t>(i)] = h(i + 1, i);
  }
  std::vector<cplx> diag(static_cast<std::size_t>(dim));
  MatsubaraFold fold(4 * cells, m);
  const double norm_a = params.gamma + params.t1 + params.t2 + std::abs(mu);
  double rounding = 0.0;
  auto local_h = [&](int c, int i, int j) { return h(2 * c + i, 2 * c + j) - (i == j ? mu : 0.0); };
  for (int n = -opts.n_max; n <= opts.n_max; ++n) {
    const double omega = matsubara_frequency(beta, stat, n);
    const cplx z = -kI * omega;
    for (int i = 0; i < dim; ++i) diag[static_cast<std::size_t>(i)] = z - mu + h(i, i);
    const auto inv = tridiagonal_inverse(diag, upper, lower);
    double g_max = 0.0;
    for (cplx v : inv.diag) g_max = std::max(g_max, std::abs(v));
    rounding += rounding_term(omega, norm_a, g_max);
    for (int c = 0; c < cells; ++c) {
      const auto a = static_cast<std::size_t>(2 * c);
      const cplx block[2][2] = {{inv.diag[a], inv.upper[a]}, {inv.lower[a], inv.diag[a + 1]}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          cplx v = block[i][j];
          if (opts.tail_correction && omega != 0.0)
            v += -(i == j ? 1.0 : 0.0) / z + local_h(c, i, j) / (z * z);
          fold.add(4 * c + 2 * i + j, n, v);
        }
    }
  }
  for (int c = 0; c < cells; ++c)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto series = fold.resolve(4 * c + 2 * i + j, stat, beta);
        for (int s = 0; s < m; ++s) {
          cplx v = series[static_cast<std::size_t>(s)];
          if (opts.tail_correction) {
            const double tau = taus[static_cast<std::size_t>(s)];
            v += (i == j ? tail_sum_first(stat, tau, beta) : 0.0) -
                 local_h(c, i, j) * tail_sum_second(stat, tau, beta);
          }
          out.matsubara_sum(i, j, c, s) = v;
        }
      }

  // Route (b): biorthogonal modes of the open chain.
  std::vector<cplx> weights(static_cast<std::size_t>(m));
  for (std::size_t mode = 0; mode < sys.size(); ++mode) {
    const cplx xi = sys.eigenvalues[mode] - mu;
    for (int s = 0; s < m; ++s)
      weights[static_cast<std::size_t>(s)] =
          mode_propagator(xi, taus[static_cast<std::size_t>(s)], beta, stat);
    const auto col = static_cast<Eigen::Index>(mode);
    for (int c = 0; c < cells; ++c)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const cplx p = sys.right(2 * c + i, col) * std::conj(sys.left(2 * c + j, col));
          auto series = out.spectral.series(i, j, c);
          for (int s = 0; s < m; ++s) series[static_cast<std::size_t>(s)] += p * weights[static_cast<std::size_t>(s)];
        }
  }

  finalize(out, opts, beta, norm_a, rounding);
  return out;
}

GreensTensor greens_real_time(const ModelParams& params, std::span<const double> t_grid) {
  params.validate();
  if (params.boundary != Boundary::Periodic)
    throw InvalidParameters("greens_real_time requires periodic boundaries");
  if (t_grid.empty()) throw InvalidParameters("greens_real_time: empty time grid");
  const int nk = params.n_cells;
  const int nt = static_cast<int>(t_grid.size());
  const auto ks = model::k_grid(nk);
  const double mu = chemical_potential(params);

  GreensMetadata meta;
  meta.params = params;
  meta.mu = mu;
  meta.method = "spectral";
  meta.x_label = "k";
  meta.x_axis = ks;
  meta.s_label = "t";
  meta.s_axis.assign(t_grid.begin(), t_grid.end());
  for (double k : ks)
    if (spectral::near_exceptional_point(params, k)) meta.skipped_k.push_back(k);

  GreensTensor gk(Domain::SpaceRealTime, nk, nt, meta);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int x = 0; x < nk; ++x) {
    const double k = ks[static_cast<std::size_t>(x)];
    if (spectral::near_exceptional_point(params, k)) continue;
    const auto sys = spectral::decompose_bloch(params, k);
    for (std::size_t mode = 0; mode < sys.size(); ++mode) {
      const cplx eps = sys.eigenvalues[mode];
      const cplx occupation = distribution(eps - mu, params.beta, params.statistics);
      const Eigen::Matrix2cd p = sys.projector(mode) * occupation;
      for (int s = 0; s < nt; ++s) {
        const cplx phase = std::exp(-kI * eps * t_grid[static_cast<std::size_t>(s)]);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) gk(i, j, x, s) += p(i, j) * phase;
      }
    }
  }
  meta.x_label = "r";
  meta.x_axis.clear();
  for (int r = 0; r < nk; ++r) meta.x_axis.push_back(r);
  return momentum_to_space(gk, std::move(meta));
}

TridiagonalInverse tridiagonal_inverse(std::span<const cplx> d, std::span<const cplx> u,
                                       std::span<const cplx> l) {
  const std::size_t n = d.size();
  if (n == 0 || u.size() + 1 != n || l.size() + 1 != n)
    throw InvalidParameters("tridiagonal_inverse: inconsistent band sizes");
  constexpr double kPivotTol = 1e-14;
  auto invert = [](cplx pivot) {
    if (std::abs(pivot) < kPivotTol) throw SingularInverseError("tridiagonal_inverse: zero pivot");
    return 1.0 / pivot;
  };
  // left[i]: last diagonal entry of the inverse of the leading block [0..i];
  // right[i]: first diagonal entry of the inverse of the trailing block [i..].
  std::vector<cplx> left(n), right(n);
  left[0] = invert(d[0]);
  for (std::size_t i = 1; i < n; ++i) left[i] = invert(d[i] - l[i - 1] * u[i - 1] * left[i - 1]);
  right[n - 1] = invert(d[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) right[i] = invert(d[i] - u[i] * l[i] * right[i + 1]);

  TridiagonalInverse out;
  out.diag.resize(n);
  out.upper.resize(n - 1);
  out.lower.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cplx pivot = d[i];
    if (i > 0) pivot -= l[i - 1] * u[i - 1] * left[i - 1];
    if (i + 1 < n) pivot -= u[i] * l[i] * right[i + 1];
    out.diag[i] = invert(pivot);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.upper[i] = -left[i] * u[i] * out.diag[i + 1];
    out.lower[i] = -out.diag[i + 1] * l[i] * left[i];
  }
  return out;
}

}  // namespace itc::greens
