#pragma once

#include <Eigen/Dense>
#include <vector>

#include "itc/params.hpp"

namespace itc::spectral {

/// Eigenvalues with biorthonormal right/left eigenvectors stored as columns.
///
/// Invariants after construction: left(:,m)^dagger right(:,n) = delta_mn,
/// sum_m right(:,m) left(:,m)^dagger = I, each right column has unit norm.
/// `condition[m]` is |phi_L^dagger phi_R| for unit-norm vectors before the
/// biorthogonal rescaling (1 for Hermitian H, -> 0 at an exceptional point).
struct BiorthogonalSystem {
  std::vector<cplx> eigenvalues;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
  std::vector<double> condition;

  std::size_t size() const { return eigenvalues.size(); }

  /// phi_R phi_L^dagger for mode m.
  Eigen::MatrixXcd projector(std::size_t m) const;

  /// max-norm of sum_m phi_R phi_L^dagger - I.
  double identity_residual() const;

  /// max-norm of sum_m eps_m phi_R phi_L^dagger - h.
  double reconstruction_residual(const Eigen::MatrixXcd& h) const;

  /// max-norm of L^dagger R - I.
  double biorthogonality_residual() const;
};

struct DecomposeOptions {
  /// Eigenvalues of H and conj(eig(H^dagger)) closer than this (relative to
  /// max(1, |H|)) are considered the same mode.
  double pairing_tol = 1e-6;
  /// Smallest acceptable |phi_L^dagger phi_R| for unit vectors. The identity
  /// residual grows like eps_mach / condition^2, so 2e-4 keeps it below 1e-8;
  /// a 2x2 block at distance d from an exceptional point has condition
  /// ~1.4 sqrt(d), i.e. this rejects d below ~2e-8.
  double min_condition = 2e-4;
};

/// Dense biorthogonal eigendecomposition. Left vectors come from the
/// eigenvectors of H^dagger; all rescaling is put on the left vectors.
/// Modes are sorted lexicographically by (Re eps, Im eps).
///
/// Throws NearDefectiveError, PairingError, InvalidParameters (non-square).
BiorthogonalSystem decompose(const Eigen::MatrixXcd& h, const DecomposeOptions& opts = {});

/// Distance in gamma (energy units) below which a Bloch point counts as an
/// exceptional point: |gamma - |t1 + t2 e^{ik}|| < kExceptionalPointTol.
inline constexpr double kExceptionalPointTol = 1e-8;

/// Closed-form 2x2 decomposition of the Bloch Hamiltonian.
/// Throws NearDefectiveError within kExceptionalPointTol of an exceptional point.
BiorthogonalSystem decompose_bloch(const ModelParams& params, double k);

/// True when decompose_bloch would reject (params, k).
bool near_exceptional_point(const ModelParams& params, double k);

struct EdgeStateReport {
  std::vector<std::size_t> indices;
  std::vector<cplx> energies;
  std::vector<double> localization;  ///< inverse participation ratio of phi_R
};

inline constexpr double kDefaultEdgeTol = 1e-4;
inline constexpr double kDefaultIprThreshold = 0.1;

/// sum_x |psi_x|^4 for the normalized state psi.
double inverse_participation_ratio(const Eigen::VectorXcd& psi);

EdgeStateReport detect_edge_states(const BiorthogonalSystem& system,
                                   double tol_edge = kDefaultEdgeTol,
                                   double ipr_threshold = kDefaultIprThreshold);

}  // namespace itc::spectral
