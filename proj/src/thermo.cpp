#include "itc/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "itc/greens.hpp"
#include "itc/model.hpp"
#include "itc/parallel.hpp"

namespace itc::thermo {

namespace {

void check_bose(const ModelParams& params, std::span<const cplx> spectrum, double mu) {
  if (params.statistics != Statistics::Boson) return;
  for (cplx e : spectrum)
    if (e.real() - mu <= 0.0)
      throw BoseConvergenceError("bosonic mode with Re(eps - mu) <= 0 at eps = " + std::to_string(e.real()) +
                                 " + " + std::to_string(e.imag()) + "i, mu = " + std::to_string(mu));
}

// -+ log(1 -+ e^{-x}) for one mode.
cplx mode_log(cplx x, Statistics s) {
  if (s == Statistics::Boson) return -std::log(1.0 - std::exp(-x));
  if (x.real() >= 0.0) return std::log(1.0 + std::exp(-x));
  return -x + std::log(1.0 + std::exp(x));
}

}  // namespace

cplx log_partition(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta) {
  if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
  check_bose(params, spectrum, mu);
  cplx sum = 0.0;
  for (cplx e : spectrum) sum += mode_log(beta * (e - mu), params.statistics);
  return sum;
}

cplx log_partition(const ModelParams& params, std::span<const cplx> spectrum, double mu) {
  return log_partition(params, spectrum, mu, params.beta);
}

RealValue internal_energy(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta) {
  if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
  check_bose(params, spectrum, mu);
  cplx sum = 0.0;
  for (cplx e : spectrum) sum += e * greens::distribution(e - mu, beta, params.statistics);
  return {sum.real(), std::abs(sum.imag())};
}

RealValue free_energy(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta) {
  const cplx z = log_partition(params, spectrum, mu, beta);
  return {-z.real() / beta, std::abs(z.imag())};
}

double entropy(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta) {
  const double u = internal_energy(params, spectrum, mu, beta).value;
  const double f = free_energy(params, spectrum, mu, beta).value;
  return beta * (u - f);
}

std::vector<double> default_beta_grid(int points, double lo, double hi) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidParameters("default_beta_grid: bad range");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

ThermoSeries thermo_sweep(const ModelParams& params, std::span<const double> beta_grid) {
  params.validate();
  if (beta_grid.empty()) throw InvalidParameters("thermo_sweep: empty beta grid");
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0)) throw InvalidParameters("thermo_sweep: beta must be > 0");
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
      throw InvalidParameters("thermo_sweep: beta grid must be strictly increasing");
  }
  const auto spectrum = model::spectrum(params);
  const double sites = static_cast<double>(spectrum.size());

  ThermoSeries out;
  out.params = params;
  out.beta.assign(beta_grid.begin(), beta_grid.end());
  const auto n = beta_grid.size();
  out.U.resize(n);
  out.F.resize(n);
  out.S.resize(n);
  out.mu.resize(n);
  out.im_residual.resize(n);

  // Exceptions cannot cross the parallel region; keep the first one.
  std::exception_ptr failure;
  const int count = static_cast<int>(n);
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (int i = 0; i < count; ++i) {
    try {
      const double beta = beta_grid[static_cast<std::size_t>(i)];
      ModelParams at = params;
      at.beta = beta;
      const double mu = greens::chemical_potential(at, spectrum);
      const auto u = internal_energy(at, spectrum, mu, beta);
      const auto f = free_energy(at, spectrum, mu, beta);
      const auto k = static_cast<std::size_t>(i);
      out.mu[k] = mu;
      out.U[k] = u.value / sites;
      out.F[k] = f.value / sites;
      out.S[k] = beta * (out.U[k] - out.F[k]);
      out.im_residual[k] = std::max(u.im_residual, f.im_residual) / sites;
    } catch (...) {
#pragma omp critical(itc_thermo_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace itc::thermo
