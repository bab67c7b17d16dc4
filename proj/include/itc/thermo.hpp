#pragma once

#include <span>
#include <string>
#include <vector>

#include "itc/params.hpp"

namespace itc::thermo {

/// log Z = sum_m -+ log(1 -+ e^{-beta (eps_m - mu)}) (boson upper sign),
/// principal branch per mode. Statistics are taken from `params`.
/// Throws BoseConvergenceError for bosons with Re(eps_m - mu) <= 0.
cplx log_partition(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta);

/// Same at params.beta.
cplx log_partition(const ModelParams& params, std::span<const cplx> spectrum, double mu);

struct RealValue {
  double value = 0.0;
  double im_residual = 0.0;  ///< |Im| of the underlying complex sum
};

/// U = Re sum_m eps_m F(eps_m - mu, beta).
RealValue internal_energy(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta);

/// F = -Re(log Z) / beta.
RealValue free_energy(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta);

/// S = beta (U - F), k_B = 1.
double entropy(const ModelParams& params, std::span<const cplx> spectrum, double mu, double beta);

/// Potentials per site (divided by the 2N single-particle modes).
struct ThermoSeries {
  ModelParams params;
  std::vector<double> beta;
  std::vector<double> U;
  std::vector<double> F;
  std::vector<double> S;
  std::vector<double> mu;           ///< chemical potential used at each beta
  std::vector<double> im_residual;  ///< max(|Im log Z|, |Im sum eps F|) / 2N
  std::string normalization = "per-site";

  std::size_t size() const { return beta.size(); }
};

/// 400 log-spaced points in [0.05, 8] unless told otherwise.
std::vector<double> default_beta_grid(int points = 400, double lo = 0.05, double hi = 8.0);

/// Sweep over a strictly increasing positive beta grid. params.beta is ignored.
ThermoSeries thermo_sweep(const ModelParams& params, std::span<const double> beta_grid);

}  // namespace itc::thermo
