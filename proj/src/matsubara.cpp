#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "itc/greens.hpp"
#include "itc/model.hpp"
#include "itc/parallel.hpp"

namespace itc::greens {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
constexpr double kPoleTol = 1e-14;
constexpr double kSingularTol = 1e-14;
}  // namespace

int matsubara_mode(Statistics s, int n) { return s == Statistics::Boson ? 2 * n : 2 * n + 1; }

double matsubara_frequency(double beta, Statistics s, int n) {
  return kPi / beta * matsubara_mode(s, n);
}

std::vector<double> MatsubaraGrid::frequencies() const {
  std::vector<double> out;
  for (int n = n_min; n <= n_max; ++n) out.push_back(frequency(n));
  return out;
}

std::vector<int> MatsubaraGrid::modes() const {
  std::vector<int> out;
  for (int n = n_min; n <= n_max; ++n) out.push_back(mode(n));
  return out;
}

cplx distribution(cplx xi, double beta, Statistics s) {
  const double zeta = statistics_sign(s);
  const cplx x = beta * xi;
  if (x.real() > 700.0) return std::exp(-x);
  if (x.real() < -700.0) return -zeta;
  const cplx denom = std::exp(x) - zeta;
  if (std::abs(denom) < kPoleTol)
    throw DistributionPoleError("distribution pole at beta*(eps - mu) = " +
                                std::to_string(x.real()) + " + " + std::to_string(x.imag()) +
                                "i");
  return 1.0 / denom;
}

cplx mode_propagator(cplx xi, double tau, double beta, Statistics s) {
  const double zeta = statistics_sign(s);
  const cplx x = beta * xi;
  if (std::abs(x.real()) < 1.0 && std::abs(std::exp(x) - zeta) < kPoleTol)
    throw DistributionPoleError("imaginary-time propagator at a distribution pole");
  if (xi.real() >= 0.0) return std::exp(-xi * tau) / (1.0 - zeta * std::exp(-x));
  return std::exp(xi * (beta - tau)) / (std::exp(x) - zeta);
}

double chemical_potential(const ModelParams& params, std::span<const cplx> spectrum) {
  if (spectrum.empty()) throw InvalidParameters("chemical_potential: empty spectrum");
  if (params.statistics == Statistics::Fermion) return -params.mu_offset;
  double lowest = spectrum.front().real();
  for (cplx e : spectrum) lowest = std::min(lowest, e.real());
  return lowest - params.mu_offset;
}

double chemical_potential(const ModelParams& params) {
  const auto eps = model::spectrum(params);
  return chemical_potential(params, eps);
}

Eigen::Matrix2cd matsubara_block(const ModelParams& params, double k, double mu, double omega) {
  Eigen::Matrix2cd a = model::bloch_hamiltonian(params, k).matrix;
  a.diagonal().array() += -kI * omega - mu;
  const cplx det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (std::abs(det) < kSingularTol)
    throw SingularInverseError("matsubara_block: singular at k = " + std::to_string(k) +
                               ", omega = " + std::to_string(omega));
  Eigen::Matrix2cd inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv / det;
}

Eigen::MatrixXcd matsubara_block_spectral(const spectral::BiorthogonalSystem& system, double mu,
                                          double omega) {
  const auto n = system.right.rows();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t m = 0; m < system.size(); ++m) {
    const cplx denom = -kI * omega - mu + system.eigenvalues[m];
    if (std::abs(denom) < kSingularTol)
      throw SingularInverseError("matsubara_block_spectral: pole hit exactly");
    g += system.projector(m) / denom;
  }
  return g;
}

GreensTensor greens_matsubara(const ModelParams& params, const MatsubaraGrid& grid) {
  params.validate();
  if (params.boundary != Boundary::Periodic)
    throw InvalidParameters("greens_matsubara requires periodic boundaries");
  if (grid.size() <= 0) throw InvalidParameters("greens_matsubara: empty Matsubara grid");
  const auto ks = model::k_grid(params.n_cells);
  const double mu = chemical_potential(params);

  GreensMetadata meta;
  meta.params = params;
  meta.mu = mu;
  meta.method = "direct-inverse";
  meta.x_label = "k";
  meta.x_axis = ks;
  meta.s_label = "n_M";
  for (int m : grid.modes()) meta.s_axis.push_back(m);
  for (double k : ks)
    if (spectral::near_exceptional_point(params, k)) meta.skipped_k.push_back(k);

  GreensTensor g(Domain::MomentumMatsubara, params.n_cells, grid.size(), std::move(meta));
  const int nk = params.n_cells;
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int x = 0; x < nk; ++x) {
    const double k = ks[static_cast<std::size_t>(x)];
    if (spectral::near_exceptional_point(params, k)) continue;
    for (int s = 0; s < grid.size(); ++s) {
      const auto block = matsubara_block(params, k, mu, grid.frequency(grid.n_min + s));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g(i, j, x, s) = block(i, j);
    }
  }
  return g;
}

GreensTensor greens_matsubara(const ModelParams& params, int n) {
  return greens_matsubara(params, MatsubaraGrid{params.beta, params.statistics, n, n});
}

std::vector<int> ResonanceReport::modes() const {
  std::set<int> unique;
  for (const auto& e : entries) unique.insert(e.n_m);
  return {unique.begin(), unique.end()};
}

double default_resonance_tolerance(const ModelParams& params) {
  const auto ks = model::k_grid(params.n_cells);
  double step = 0.0;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const double k0 = ks[j];
    const double k1 = ks[(j + 1) % ks.size()];
    for (auto band : {model::Band::Minus, model::Band::Plus})
      step = std::max(step, std::abs(model::dispersion(params, k1, band) -
                                     model::dispersion(params, k0, band)));
  }
  return std::max(step, 2.0 * kPi / (params.beta * params.n_cells));
}

ResonanceReport find_resonances(const ModelParams& params, const ResonanceOptions& opts) {
  params.validate();
  if (params.boundary != Boundary::Periodic)
    throw InvalidParameters("find_resonances requires periodic boundaries");
  ResonanceReport report;
  report.mu_used = chemical_potential(params);
  const double fallback = default_resonance_tolerance(params);
  report.tol_re = opts.tol_re > 0.0 ? opts.tol_re : fallback;
  report.tol_im = opts.tol_im > 0.0 ? opts.tol_im : fallback;
  const double spacing = 2.0 * kPi / params.beta;  // between same-parity modes
  const bool boson = params.statistics == Statistics::Boson;

  for (double k : model::k_grid(params.n_cells)) {
    for (auto band : {model::Band::Minus, model::Band::Plus}) {
      const cplx e = model::dispersion(params, k, band);
      if (std::abs(e.real() - report.mu_used) >= report.tol_re) continue;
      // Nearest mode of the right parity.
      const double shift = boson ? 0.0 : kPi / params.beta;
      const int n = static_cast<int>(std::lround((e.imag() - shift) / spacing));
      const int n_m = matsubara_mode(params.statistics, n);
      const double omega = kPi / params.beta * n_m;
      if (std::abs(e.imag() - omega) < report.tol_im) report.entries.push_back({n_m, k, e});
    }
  }
  return report;
}

}  // namespace itc::greens
