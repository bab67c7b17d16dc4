#include "itc/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace itc {

void ModelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(t1) || !finite(t2) || !finite(gamma) || !finite(beta) || !finite(mu_offset))
    throw InvalidParameters("model parameters must be finite");
  if (t1 <= 0.0) throw InvalidParameters("t1 must be > 0");
  if (t2 <= 0.0) throw InvalidParameters("t2 must be > 0");
  if (gamma < 0.0) throw InvalidParameters("gamma must be >= 0");
  if (beta <= 0.0) throw InvalidParameters("beta must be > 0");
  if (n_cells < 2) throw InvalidParameters("n_cells must be >= 2");
  if (mu_offset <= 0.0) throw InvalidParameters("mu_offset must be > 0");
}

std::string_view to_string(Boundary b) { return b == Boundary::Periodic ? "pbc" : "obc"; }

std::string_view to_string(Statistics s) { return s == Statistics::Boson ? "boson" : "fermion"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "pbc" || text == "PBC") return Boundary::Periodic;
  if (text == "obc" || text == "OBC") return Boundary::Open;
  throw InvalidParameters("unknown boundary '" + std::string(text) + "' (expected pbc|obc)");
}

Statistics parse_statistics(std::string_view text) {
  if (text == "boson" || text == "bose") return Statistics::Boson;
  if (text == "fermion" || text == "fermi") return Statistics::Fermion;
  throw InvalidParameters("unknown statistics '" + std::string(text) + "' (expected boson|fermion)");
}

}  // namespace itc

namespace itc::model {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
}  // namespace

std::string_view to_string(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::RealLineGap: return "real-line-gap";
    case PhaseLabel::Gapless: return "gapless";
    case PhaseLabel::MixedBroken: return "mixed-broken";
    case PhaseLabel::FullyImaginary: return "fully-imaginary";
    case PhaseLabel::ImaginaryLineGap: return "imaginary-line-gap";
  }
  return "unknown";
}

double reduce_momentum(double k) {
  double r = std::fmod(k, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

BlochHamiltonian bloch_hamiltonian(const ModelParams& params, double k) {
  BlochHamiltonian h;
  h.k = reduce_momentum(k);
  const cplx phase = std::exp(-kI * h.k);
  h.matrix(0, 0) = -kI * params.gamma;
  h.matrix(1, 1) = kI * params.gamma;
  h.matrix(0, 1) = -(params.t1 + params.t2 * phase);
  h.matrix(1, 0) = -(params.t1 + params.t2 * std::conj(phase));
  return h;
}

OpenChainHamiltonian open_hamiltonian(const ModelParams& params) {
  if (params.n_cells < 2) throw InvalidParameters("open chain needs n_cells >= 2");
  const int dim = 2 * params.n_cells;
  OpenChainHamiltonian h;
  h.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (int c = 0; c < params.n_cells; ++c) {
    const int a = 2 * c;
    const int b = a + 1;
    h.matrix(a, a) = -kI * params.gamma;
    h.matrix(b, b) = kI * params.gamma;
    h.matrix(a, b) = h.matrix(b, a) = -params.t1;
    if (c + 1 < params.n_cells) h.matrix(b, a + 2) = h.matrix(a + 2, b) = -params.t2;
  }
  return h;
}

cplx dispersion(const ModelParams& params, double k, Band band) {
  const double arg = -params.gamma * params.gamma + params.t1 * params.t1 +
                     params.t2 * params.t2 + 2.0 * params.t1 * params.t2 * std::cos(k);
  const cplx root = arg >= 0.0 ? cplx{std::sqrt(arg), 0.0} : cplx{0.0, std::sqrt(-arg)};
  return band == Band::Plus ? root : -root;
}

double hopping_modulus(const ModelParams& params, double k) {
  return std::abs(params.t1 + params.t2 * std::exp(kI * k));
}

PhaseLabel classify_phase(const ModelParams& params) {
  const double lower = std::abs(params.t2 - params.t1);
  const double upper = params.t1 + params.t2;
  const double g = params.gamma;
  if (std::abs(g - lower) <= kPhaseBoundaryTol || std::abs(g - upper) <= kPhaseBoundaryTol)
    return PhaseLabel::Gapless;
  if (g < lower) return PhaseLabel::RealLineGap;
  if (g < upper) return PhaseLabel::MixedBroken;
  return PhaseLabel::ImaginaryLineGap;
}

std::vector<double> k_grid(int n_cells) {
  std::vector<double> ks(static_cast<std::size_t>(n_cells));
  for (int j = 0; j < n_cells; ++j) ks[static_cast<std::size_t>(j)] = kTwoPi * j / n_cells;
  return ks;
}

std::vector<cplx> bloch_spectrum(const ModelParams& params) {
  std::vector<cplx> out;
  out.reserve(2 * static_cast<std::size_t>(params.n_cells));
  for (double k : k_grid(params.n_cells)) {
    out.push_back(dispersion(params, k, Band::Minus));
    out.push_back(dispersion(params, k, Band::Plus));
  }
  return out;
}

std::vector<cplx> spectrum(const ModelParams& params) {
  if (params.boundary == Boundary::Periodic) return bloch_spectrum(params);
  const auto h = open_hamiltonian(params);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.matrix, false);
  if (solver.info() != Eigen::Success) throw NumericalError("open-chain eigenvalues did not converge");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace itc::model
