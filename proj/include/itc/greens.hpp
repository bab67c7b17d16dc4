#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "itc/params.hpp"
#include "itc/spectral.hpp"

namespace itc::greens {

// ---------------------------------------------------------------------------
// Matsubara frequencies and distributions
// ---------------------------------------------------------------------------

/// n_M = 2n (bosons) or 2n + 1 (fermions).
int matsubara_mode(Statistics s, int n);

/// omega_n = (pi / beta) n_M.
double matsubara_frequency(double beta, Statistics s, int n);

/// Contiguous range n_min..n_max of Matsubara indices.
struct MatsubaraGrid {
  double beta = 1.0;
  Statistics statistics = Statistics::Fermion;
  int n_min = 0;
  int n_max = 0;

  int size() const { return n_max - n_min + 1; }
  int mode(int n) const { return matsubara_mode(statistics, n); }
  double frequency(int n) const { return matsubara_frequency(beta, statistics, n); }
  std::vector<double> frequencies() const;
  std::vector<int> modes() const;
};

/// 1 / (e^{beta xi} -+ 1) at complex xi (BE upper, FD lower sign).
/// Throws DistributionPoleError at an exact pole.
cplx distribution(cplx xi, double beta, Statistics s);

/// Imaginary-time propagator of one mode, tau in [0, beta), tau = 0 meaning 0+:
/// g(tau) = e^{-xi tau} (1 +- F(xi)) = e^{-xi tau} / (1 -+ e^{-beta xi}).
/// Its Matsubara transform is 1 / (xi - i omega_n).
cplx mode_propagator(cplx xi, double tau, double beta, Statistics s);

/// Fermions: -mu_offset. Bosons: min Re(eps) - mu_offset.
double chemical_potential(const ModelParams& params, std::span<const cplx> spectrum);

/// chemical_potential over model::spectrum(params).
double chemical_potential(const ModelParams& params);

// ---------------------------------------------------------------------------
// Green's-function tensors
// ---------------------------------------------------------------------------

enum class Domain { SpaceTau, MomentumMatsubara, SpaceRealTime };

std::string_view to_string(Domain d);

struct GreensMetadata {
  ModelParams params;
  double mu = 0.0;
  std::string method;
  std::string x_label;  ///< "r" (cells), "k", or "cell"
  std::vector<double> x_axis;
  std::string s_label;  ///< "tau", "n_M", or "t"
  std::vector<double> s_axis;
  std::vector<double> skipped_k;
  std::vector<std::string> warnings;
};

/// Complex values G^{(i,j)}(x, s) with sublattice indices i, j in {0, 1}
/// (0 = A, loss; 1 = B, gain).
class GreensTensor {
 public:
  GreensTensor() = default;
  GreensTensor(Domain domain, int nx, int ns, GreensMetadata meta);

  Domain domain() const { return domain_; }
  int nx() const { return nx_; }
  int ns() const { return ns_; }
  const GreensMetadata& meta() const { return meta_; }
  GreensMetadata& meta() { return meta_; }

  cplx& operator()(int i, int j, int x, int s) { return values_[index(i, j, x, s)]; }
  cplx operator()(int i, int j, int x, int s) const { return values_[index(i, j, x, s)]; }

  /// Contiguous series over s for fixed (i, j, x).
  std::span<cplx> series(int i, int j, int x) {
    return {values_.data() + index(i, j, x, 0), static_cast<std::size_t>(ns_)};
  }
  std::span<const cplx> series(int i, int j, int x) const {
    return {values_.data() + index(i, j, x, 0), static_cast<std::size_t>(ns_)};
  }

  std::span<const cplx> values() const { return values_; }

  /// max |this - other| over all entries; shapes must agree.
  double max_abs_difference(const GreensTensor& other) const;

 private:
  std::size_t index(int i, int j, int x, int s) const {
    return ((static_cast<std::size_t>(i * 2 + j) * static_cast<std::size_t>(nx_) +
             static_cast<std::size_t>(x)) *
            static_cast<std::size_t>(ns_)) +
           static_cast<std::size_t>(s);
  }

  Domain domain_ = Domain::SpaceTau;
  int nx_ = 0;
  int ns_ = 0;
  GreensMetadata meta_;
  std::vector<cplx> values_;
};

// ---------------------------------------------------------------------------
// Matsubara domain
// ---------------------------------------------------------------------------

/// Direct 2x2 inverse of (-i omega - mu + H(k)).
/// Throws SingularInverseError if |det| < 1e-14.
Eigen::Matrix2cd matsubara_block(const ModelParams& params, double k, double mu, double omega);

/// sum_m phi_R phi_L^dagger / (-i omega - mu + eps_m).
Eigen::MatrixXcd matsubara_block_spectral(const spectral::BiorthogonalSystem& system, double mu,
                                          double omega);

/// PBC Matsubara Green's function over the k-grid for every n in `grid`
/// (x = k index, s = position in the grid). Exceptional k-points are
/// recorded in metadata and left at zero.
GreensTensor greens_matsubara(const ModelParams& params, const MatsubaraGrid& grid);

/// Single Matsubara slice n.
GreensTensor greens_matsubara(const ModelParams& params, int n);

struct ResonanceEntry {
  int n_m = 0;
  double k = 0.0;
  cplx energy;
};

struct ResonanceReport {
  std::vector<ResonanceEntry> entries;
  double mu_used = 0.0;
  double tol_re = 0.0;
  double tol_im = 0.0;

  /// Distinct n_M values, ascending.
  std::vector<int> modes() const;
};

struct ResonanceOptions {
  /// Non-positive values select the grid-resolution defaults.
  double tol_re = 0.0;
  double tol_im = 0.0;
};

/// Default resonance tolerance: the largest change of eps between
/// neighbouring k-grid points, floored at 2 pi / (beta N).
double default_resonance_tolerance(const ModelParams& params);

/// Scan the k-grid and both bands for eps(k) = i omega_n + mu.
ResonanceReport find_resonances(const ModelParams& params, const ResonanceOptions& opts = {});

// ---------------------------------------------------------------------------
// Imaginary time
// ---------------------------------------------------------------------------

struct ImagTimeOptions {
  int n_max = 10000;
  int tau_points = 512;
  /// Sum the 1/omega and 1/omega^2 tails of the Matsubara series in closed
  /// form, leaving an O(1/n_max^2) remainder. Without it, the truncation
  /// error is O(1/n_max) and tau = 0 converges to the midpoint of the jump.
  bool tail_correction = true;
};

/// Both evaluation routes of G(tau) on the grid tau_j = j beta / M.
struct ImagTimeGreens {
  GreensTensor matsubara_sum;  ///< truncated Matsubara reconstruction
  GreensTensor spectral;       ///< closed-form biorthogonal representation
  double max_deviation = 0.0;
  double expected_error = 0.0;
  bool converged = true;  ///< false: max_deviation > 10 * expected_error
};

/// PBC: x = r (unit cells, 0..N-1), G(r) = (1/N) sum_k e^{ikr} G(k).
/// OBC requests are forwarded to greens_imag_time_obc.
ImagTimeGreens greens_imag_time(const ModelParams& params, const ImagTimeOptions& opts = {});

/// OBC, fermions only: x = cell c, entries G_{(c,i),(c,j)}(tau).
ImagTimeGreens greens_imag_time_obc(const ModelParams& params, const ImagTimeOptions& opts = {});

/// tau_j = j beta / M.
std::vector<double> tau_grid(double beta, int points);

// ---------------------------------------------------------------------------
// Real time
// ---------------------------------------------------------------------------

/// G(r, t) = (1/N) sum_k e^{ikr} sum_m phi_R phi_L^dagger F(eps_m - mu) e^{-i eps_m t} (PBC).
GreensTensor greens_real_time(const ModelParams& params, std::span<const double> t_grid);

/// Diagonal blocks and nearest off-diagonals of (A)^{-1} for a tridiagonal A.
struct TridiagonalInverse {
  std::vector<cplx> diag;   ///< G_{i,i}
  std::vector<cplx> upper;  ///< G_{i,i+1}
  std::vector<cplx> lower;  ///< G_{i+1,i}
};

/// A has diagonal d, superdiagonal u (A_{i,i+1}) and subdiagonal l (A_{i+1,i}).
/// Throws SingularInverseError on a vanishing pivot.
TridiagonalInverse tridiagonal_inverse(std::span<const cplx> d, std::span<const cplx> u,
                                       std::span<const cplx> l);

}  // namespace itc::greens
