#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "itc/params.hpp"

namespace itc::model {

struct BlochHamiltonian {
  double k = 0.0;  ///< reduced to [0, 2pi)
  Eigen::Matrix2cd matrix;
};

/// 2N x 2N real-space Hamiltonian, site order A1, B1, A2, B2, ...
struct OpenChainHamiltonian {
  Eigen::MatrixXcd matrix;
};

enum class PhaseLabel { RealLineGap, Gapless, MixedBroken, FullyImaginary, ImaginaryLineGap };
enum class Band { Plus, Minus };

std::string_view to_string(PhaseLabel p);

/// Reduce k into [0, 2pi).
double reduce_momentum(double k);

/// H(k) = [[-i g, -(t1 + t2 e^{-ik})], [-(t1 + t2 e^{ik}), +i g]].
BlochHamiltonian bloch_hamiltonian(const ModelParams& params, double k);

OpenChainHamiltonian open_hamiltonian(const ModelParams& params);

/// +-sqrt(-g^2 + t1^2 + t2^2 + 2 t1 t2 cos k). Plus has Re >= 0, and Im >= 0
/// when the value is purely imaginary.
cplx dispersion(const ModelParams& params, double k, Band band);

/// |t1 + t2 e^{ik}|, the modulus of the off-diagonal Bloch element.
double hopping_modulus(const ModelParams& params, double k);

/// Tolerance used by classify_phase to decide that gamma sits on a boundary.
inline constexpr double kPhaseBoundaryTol = 1e-12;

PhaseLabel classify_phase(const ModelParams& params);

/// k_j = 2 pi j / N, j = 0..N-1.
std::vector<double> k_grid(int n_cells);

/// Both bands at every k-grid point, ordered (k0 Minus, k0 Plus, k1 Minus, ...).
std::vector<cplx> bloch_spectrum(const ModelParams& params);

/// Single-particle spectrum for the configured boundary: the closed-form
/// Bloch bands for PBC, dense eigenvalues of the open chain for OBC.
std::vector<cplx> spectrum(const ModelParams& params);

}  // namespace itc::model
