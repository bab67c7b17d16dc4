#include "itc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "itc/model.hpp"

namespace itc::spectral {

namespace {

constexpr cplx kI{0.0, 1.0};

// Sort key that is insensitive to round-off in the real part, so that
// conjugate pairs on the imaginary axis order by Im.
struct ModeKey {
  long long re_bucket;
  double im;
  bool operator<(const ModeKey& o) const {
    return re_bucket != o.re_bucket ? re_bucket < o.re_bucket : im < o.im;
  }
};

ModeKey mode_key(cplx e, double resolution) {
  return {static_cast<long long>(std::llround(e.real() / resolution)), e.imag()};
}

// Union-find clusters of eigenvalues closer than tol.
std::vector<std::vector<std::size_t>> cluster(const std::vector<cplx>& values, double tol) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (std::abs(values[a] - values[b]) < tol) parent[find(a)] = find(b);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

std::string describe(cplx e) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << e.real() << (e.imag() < 0 ? " - " : " + ") << std::abs(e.imag()) << "i)";
  return os.str();
}

BiorthogonalSystem sorted(BiorthogonalSystem sys, double resolution) {
  std::vector<std::size_t> order(sys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mode_key(sys.eigenvalues[a], resolution) < mode_key(sys.eigenvalues[b], resolution);
  });
  BiorthogonalSystem out;
  out.right.resize(sys.right.rows(), sys.right.cols());
  out.left.resize(sys.left.rows(), sys.left.cols());
  for (std::size_t m = 0; m < order.size(); ++m) {
    const auto src = static_cast<Eigen::Index>(order[m]);
    const auto dst = static_cast<Eigen::Index>(m);
    out.eigenvalues.push_back(sys.eigenvalues[order[m]]);
    out.condition.push_back(sys.condition[order[m]]);
    out.right.col(dst) = sys.right.col(src);
    out.left.col(dst) = sys.left.col(src);
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd BiorthogonalSystem::projector(std::size_t m) const {
  const auto c = static_cast<Eigen::Index>(m);
  return right.col(c) * left.col(c).adjoint();
}

double BiorthogonalSystem::identity_residual() const {
  const Eigen::MatrixXcd sum = right * left.adjoint();
  return (sum - Eigen::MatrixXcd::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
}

double BiorthogonalSystem::reconstruction_residual(const Eigen::MatrixXcd& h) const {
  Eigen::VectorXcd eps(static_cast<Eigen::Index>(size()));
  for (std::size_t m = 0; m < size(); ++m) eps(static_cast<Eigen::Index>(m)) = eigenvalues[m];
  const Eigen::MatrixXcd rebuilt = right * eps.asDiagonal() * left.adjoint();
  return (rebuilt - h).cwiseAbs().maxCoeff();
}

double BiorthogonalSystem::biorthogonality_residual() const {
  const Eigen::MatrixXcd overlap = left.adjoint() * right;
  return (overlap - Eigen::MatrixXcd::Identity(overlap.rows(), overlap.cols()))
      .cwiseAbs()
      .maxCoeff();
}

BiorthogonalSystem decompose(const Eigen::MatrixXcd& h, const DecomposeOptions& opts) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw InvalidParameters("decompose: matrix must be square and non-empty");
  const Eigen::Index n = h.rows();
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double tol = opts.pairing_tol * scale;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right_solver(h, true);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left_solver(h.adjoint(), true);
  if (right_solver.info() != Eigen::Success || left_solver.info() != Eigen::Success)
    throw NumericalError("decompose: eigensolver did not converge");

  std::vector<cplx> eps(static_cast<std::size_t>(n));
  std::vector<cplx> eps_left(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    eps[static_cast<std::size_t>(i)] = right_solver.eigenvalues()(i);
    eps_left[static_cast<std::size_t>(i)] = std::conj(left_solver.eigenvalues()(i));
  }

  BiorthogonalSystem sys;
  sys.eigenvalues = eps;
  sys.right = right_solver.eigenvectors();
  sys.left.resize(n, n);
  sys.condition.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i) sys.right.col(i).normalize();

  std::vector<int> claimed(static_cast<std::size_t>(n), 0);
  for (const auto& group : cluster(eps, tol)) {
    std::vector<std::size_t> partners;
    for (std::size_t j = 0; j < eps_left.size(); ++j) {
      const bool near = std::any_of(group.begin(), group.end(), [&](std::size_t i) {
        return std::abs(eps[i] - eps_left[j]) < tol;
      });
      if (near) partners.push_back(j);
    }
    if (partners.size() != group.size())
      throw PairingError("decompose: eigenvalue " + describe(eps[group.front()]) + " has " +
                         std::to_string(group.size()) + " right but " +
                         std::to_string(partners.size()) + " left partners");
    for (std::size_t j : partners)
      if (claimed[j]++ > 0) throw PairingError("decompose: ambiguous left/right pairing");

    const auto d = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXcd r(n, d);
    Eigen::MatrixXcd l(n, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      r.col(c) = sys.right.col(static_cast<Eigen::Index>(group[static_cast<std::size_t>(c)]));
      l.col(c) = left_solver.eigenvectors()
                     .col(static_cast<Eigen::Index>(partners[static_cast<std::size_t>(c)]))
                     .normalized();
    }
    const Eigen::MatrixXcd overlap = l.adjoint() * r;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(overlap);
    const double cond = svd.singularValues().minCoeff();
    for (std::size_t i : group) sys.condition[i] = d == 1 ? std::abs(overlap(0, 0)) : cond;
    if (cond < opts.min_condition)
      throw NearDefectiveError("decompose: eigenvectors coalesce near " +
                               describe(eps[group.front()]) +
                               " (|phi_L^dag phi_R| = " + std::to_string(cond) + ")");
    // phi_L = L (L^dag R)^{-dag} so that phi_L^dag R = 1 within the cluster.
    const Eigen::MatrixXcd scaled = l * overlap.inverse().adjoint();
    for (Eigen::Index c = 0; c < d; ++c)
      sys.left.col(static_cast<Eigen::Index>(group[static_cast<std::size_t>(c)])) = scaled.col(c);
  }
  return sorted(std::move(sys), 1e-9 * scale);
}

bool near_exceptional_point(const ModelParams& params, double k) {
  return std::abs(params.gamma - model::hopping_modulus(params, k)) < kExceptionalPointTol;
}

BiorthogonalSystem decompose_bloch(const ModelParams& params, double k) {
  if (near_exceptional_point(params, k)) {
    std::ostringstream os;
    os << "decompose_bloch: exceptional point at k = " << k << " (gamma = " << params.gamma
       << ", |t1 + t2 e^ik| = " << model::hopping_modulus(params, k) << ")";
    throw NearDefectiveError(os.str());
  }
  const auto bloch = model::bloch_hamiltonian(params, k);
  const cplx h12 = bloch.matrix(0, 1);
  const cplx h21 = bloch.matrix(1, 0);
  const cplx ig = kI * params.gamma;

  BiorthogonalSystem sys;
  sys.right.resize(2, 2);
  sys.left.resize(2, 2);
  const cplx plus = model::dispersion(params, bloch.k, model::Band::Plus);
  const double resolution = 1e-9 * std::max(1.0, std::abs(plus));
  // Ascending lexicographic order of {-eps, +eps}.
  const bool minus_first = mode_key(-plus, resolution) < mode_key(plus, resolution);
  sys.eigenvalues = minus_first ? std::vector<cplx>{-plus, plus} : std::vector<cplx>{plus, -plus};

  for (Eigen::Index m = 0; m < 2; ++m) {
    const cplx e = sys.eigenvalues[static_cast<std::size_t>(m)];
    // Two equivalent null vectors of (H - e); keep the better-conditioned one.
    Eigen::Vector2cd r1(h12, ig + e);
    Eigen::Vector2cd r2(e - ig, h21);
    Eigen::Vector2cd r = r1.norm() >= r2.norm() ? r1 : r2;
    // Row null vectors u with u (H - e) = 0, stored as phi_L = u^dagger.
    Eigen::Vector2cd u1(h21, ig + e);
    Eigen::Vector2cd u2(e - ig, h12);
    Eigen::Vector2cd u = u1.norm() >= u2.norm() ? u1 : u2;
    r.normalize();
    u.normalize();
    Eigen::Vector2cd l = u.conjugate();
    const cplx overlap = l.dot(r);  // l^dagger r
    sys.condition.push_back(std::abs(overlap));
    sys.right.col(m) = r;
    sys.left.col(m) = l / std::conj(overlap);
  }
  return sys;
}

double inverse_participation_ratio(const Eigen::VectorXcd& psi) {
  const double norm2 = psi.squaredNorm();
  if (norm2 == 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi(i)) / norm2;
    sum += p * p;
  }
  return sum;
}

EdgeStateReport detect_edge_states(const BiorthogonalSystem& system, double tol_edge,
                                   double ipr_threshold) {
  EdgeStateReport report;
  for (std::size_t m = 0; m < system.size(); ++m) {
    const cplx e = system.eigenvalues[m];
    if (std::abs(e.real()) >= tol_edge) continue;
    const double ipr = inverse_participation_ratio(system.right.col(static_cast<Eigen::Index>(m)));
    if (ipr <= ipr_threshold) continue;
    report.indices.push_back(m);
    report.energies.push_back(e);
    report.localization.push_back(ipr);
  }
  return report;
}

}  // namespace itc::spectral
