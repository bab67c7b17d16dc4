#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace itc {

using cplx = std::complex<double>;

enum class Boundary { Periodic, Open };
enum class Statistics { Boson, Fermion };

/// Physical and numerical parameters of the gain/loss SSH chain.
///
/// Units: hbar = a = k_B = 1. Energies are raw reals, conventionally in
/// units of t1. Sublattice A (index 1) carries loss -i*gamma, sublattice B
/// (index 2) carries gain +i*gamma.
struct ModelParams {
  double t1 = 1.0;
  double t2 = 2.0;
  double gamma = 0.0;
  int n_cells = 200;
  Boundary boundary = Boundary::Periodic;
  Statistics statistics = Statistics::Fermion;
  double beta = 2.0 * std::numbers::pi;
  double mu_offset = 1e-5;

  /// Throws InvalidParameters when an invariant is violated.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// +1 for bosons, -1 for fermions.
constexpr double statistics_sign(Statistics s) { return s == Statistics::Boson ? 1.0 : -1.0; }

std::string_view to_string(Boundary b);
std::string_view to_string(Statistics s);
Boundary parse_boundary(std::string_view text);
Statistics parse_statistics(std::string_view text);

// Error hierarchy. InvalidParameters signals a bad request (CLI exit code 2);
// NumericalError and its children signal a numerical breakdown at a valid
// parameter point (CLI exit code 3).

class InvalidParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvectors nearly coalesce (exceptional-point proximity).
class NearDefectiveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Spectra of H and H^dagger could not be matched one-to-one.
class PairingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularInverseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Exact pole of the Bose-Einstein or Fermi-Dirac distribution.
class DistributionPoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Bosonic occupation requested with Re(eps - mu) <= 0.
class BoseConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace itc
