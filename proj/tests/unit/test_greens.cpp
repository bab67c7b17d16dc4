#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "itc/analysis.hpp"
#include "itc/greens.hpp"
#include "itc/model.hpp"

using namespace itc;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};

ModelParams chain(double gamma, double beta, Statistics s, int n = 200) {
  ModelParams p;
  p.t1 = 1.0;
  p.t2 = 2.0;
  p.gamma = gamma;
  p.beta = beta;
  p.statistics = s;
  p.n_cells = n;
  return p;
}

// e^{-tau A} (1 - zeta e^{-beta A})^{-1}, A = H - mu, by matrix exponentials.
Eigen::MatrixXcd expm_propagator(const Eigen::MatrixXcd& h, double mu, double tau, double beta,
                                 Statistics s) {
  const auto n = h.rows();
  const Eigen::MatrixXcd a = h - mu * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd e_beta = (-beta * a).exp();
  const Eigen::MatrixXcd denom = Eigen::MatrixXcd::Identity(n, n) - statistics_sign(s) * e_beta;
  return (-tau * a).exp() * denom.inverse();
}

}  // namespace

TEST_CASE("matsubara frequencies and modes") {
  CHECK(greens::matsubara_frequency(2 * pi, Statistics::Boson, 0) == 0.0);
  CHECK(greens::matsubara_frequency(pi, Statistics::Fermion, 0) == doctest::Approx(1.0));
  CHECK(greens::matsubara_frequency(2.0, Statistics::Fermion, -1) == doctest::Approx(-pi / 2));
  CHECK(greens::matsubara_mode(Statistics::Boson, -3) == -6);
  CHECK(greens::matsubara_mode(Statistics::Fermion, -3) == -5);
  greens::MatsubaraGrid grid{2 * pi, Statistics::Fermion, -2, 1};
  CHECK(grid.size() == 4);
  CHECK(grid.modes() == std::vector<int>{-3, -1, 1, 3});
}

TEST_CASE("distributions") {
  CHECK(std::abs(greens::distribution(1.0, std::log(2.0), Statistics::Boson) - 1.0) < 1e-15);
  CHECK(std::abs(greens::distribution(0.0, 3.0, Statistics::Fermion) - 0.5) < 1e-15);
  CHECK(std::abs(greens::distribution(-1e4, 1.0, Statistics::Fermion) - 1.0) < 1e-15);
  CHECK_THROWS_AS(greens::distribution(2.0 * pi * I / 4.0, 4.0, Statistics::Boson), DistributionPoleError);
  CHECK_THROWS_AS(greens::distribution(0.0, 4.0, Statistics::Boson), DistributionPoleError);
  // |F_BE| at beta = 4 peaks where beta * Im eps hits 2 pi, i.e. Im eps = pi/2
  double best = 0.0, where = 0.0;
  for (int i = 1; i < 4000; ++i) {
    const double y = 3.0 * i / 4000;
    const double f = std::abs(greens::distribution(cplx(1e-3, y), 4.0, Statistics::Boson));
    if (f > best) best = f, where = y;
  }
  CHECK(where == doctest::Approx(pi / 2).epsilon(1e-3));
}

TEST_CASE("chemical potential") {
  auto p = chain(0.0, 2 * pi, Statistics::Fermion);
  CHECK(greens::chemical_potential(p) == -1e-5);
  p.statistics = Statistics::Boson;
  CHECK(greens::chemical_potential(p) == doctest::Approx(-3.0 - 1e-5).epsilon(1e-14));
  p.gamma = 3.0;
  CHECK(std::abs(greens::chemical_potential(p) + 1e-5) < 1e-12);
}

TEST_CASE("matsubara block: direct inverse") {
  const auto p = chain(0.0, 2 * pi, Statistics::Fermion);
  const double omega = greens::matsubara_frequency(p.beta, p.statistics, 0);
  const auto g = greens::matsubara_block(p, 0.0, -1e-5, omega);
  Eigen::Matrix2cd a;
  a << -0.5 * I + 1e-5, -3.0, -3.0, -0.5 * I + 1e-5;
  CHECK((g * a - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((g - a.inverse()).cwiseAbs().maxCoeff() < 1e-14);

  const auto slice = greens::greens_matsubara(p, 0);
  CHECK(slice.domain() == greens::Domain::MomentumMatsubara);
  CHECK(std::abs(slice(0, 1, 0, 0) - g(0, 1)) < 1e-15);
}

TEST_CASE("spectral and direct matsubara blocks agree") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> gd(0.0, 4.0), kd(0.0, 2 * pi), bd(0.5, 15.0);
  std::uniform_int_distribution<int> nd(-200, 200);
  for (int i = 0; i < 2000; ++i) {
    const auto s = i % 2 ? Statistics::Boson : Statistics::Fermion;
    auto p = chain(gd(rng), bd(rng), s);
    const double k = kd(rng);
    if (spectral::near_exceptional_point(p, k)) continue;
    const double mu = -p.mu_offset;
    const double omega = greens::matsubara_frequency(p.beta, s, nd(rng));
    const auto direct = greens::matsubara_block(p, k, mu, omega);
    const auto viaspec = greens::matsubara_block_spectral(spectral::decompose_bloch(p, k), mu, omega);
    const double scale = std::max(1.0, direct.cwiseAbs().maxCoeff());
    CHECK((direct - viaspec).cwiseAbs().maxCoeff() / scale < 1e-8);
  }
}

TEST_CASE("resonances against a brute-force scan") {
  // max_k Im eps = sqrt(gamma^2 - (t2 - t1)^2) at k = pi
  auto p = chain(3.0, 2 * pi, Statistics::Fermion);
  double top = 0.0;
  for (int j = 0; j < 100000; ++j)
    top = std::max(top, model::dispersion(p, 2 * pi * j / 100000, model::Band::Plus).imag());
  CHECK(top == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  // |n_M| < beta top / pi = 4 sqrt 2 ~ 5.66 admits +-5 for fermions
  CHECK(p.beta * top / pi == doctest::Approx(4.0 * std::sqrt(2.0)));

  const auto fermions = greens::find_resonances(p).modes();
  CHECK(fermions == std::vector<int>{-5, -3, -1, 1, 3, 5});
  p.statistics = Statistics::Boson;
  CHECK(greens::find_resonances(p).modes() == std::vector<int>{-4, -2, 0, 2, 4});

  auto weak = chain(0.5, 2 * pi, Statistics::Boson);
  CHECK(greens::find_resonances(weak).modes() == std::vector<int>{0});
  weak.beta = 17.0;
  CHECK(greens::find_resonances(weak).modes() == std::vector<int>{0});

  // a larger beta admits at least the same |n_M|
  auto hot = chain(3.0, pi, Statistics::Boson);
  auto cold = chain(3.0, 4 * pi, Statistics::Boson);
  const auto few = greens::find_resonances(hot).modes();
  const auto many = greens::find_resonances(cold).modes();
  CHECK(many.size() > few.size());

  // direct check of each reported pair
  auto fig = chain(3.0, 2 * pi, Statistics::Fermion);
  const auto rep = greens::find_resonances(fig);
  for (const auto& e : rep.entries) {
    CHECK(std::abs(e.energy.real() - rep.mu_used) < rep.tol_re);
    CHECK(std::abs(e.energy.imag() - pi / fig.beta * e.n_m) < rep.tol_im);
  }
}

TEST_CASE("matsubara tensor sublattice structure") {
  const auto p = chain(3.0, 2 * pi, Statistics::Fermion);
  const greens::MatsubaraGrid grid{p.beta, p.statistics, -6, 5};
  const auto g = greens::greens_matsubara(p, grid);
  for (int x = 0; x < g.nx(); ++x)
    for (int s = 0; s < grid.size(); ++s) {
      // |G12(n)| = |G12(-n)|: positions s and size-1-s hold n_M and -n_M
      const double a = std::abs(g(0, 1, x, s));
      const double b = std::abs(g(0, 1, x, grid.size() - 1 - s));
      CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, a));
    }
  double best11 = 0.0, best22 = 0.0;
  int at11 = 0, at22 = 0;
  for (int x = 0; x < g.nx(); ++x)
    for (int s = 0; s < grid.size(); ++s) {
      if (std::abs(g(0, 0, x, s)) > best11) best11 = std::abs(g(0, 0, x, s)), at11 = grid.mode(grid.n_min + s);
      if (std::abs(g(1, 1, x, s)) > best22) best22 = std::abs(g(1, 1, x, s)), at22 = grid.mode(grid.n_min + s);
    }
  CHECK(at11 < 0);
  CHECK(at22 > 0);
  CHECK(best11 > 1e3);
}

TEST_CASE("tridiagonal inverse against a dense inverse") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int n : {1, 2, 3, 10, 41}) {
    std::vector<cplx> d(n), u(n - 1), l(n - 1);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = d[i] = cplx(nd(rng) + 4.0, nd(rng));
    for (int i = 0; i + 1 < n; ++i) {
      a(i, i + 1) = u[i] = cplx(nd(rng), nd(rng));
      a(i + 1, i) = l[i] = cplx(nd(rng), nd(rng));
    }
    const Eigen::MatrixXcd inv = a.partialPivLu().inverse();
    const auto t = greens::tridiagonal_inverse(d, u, l);
    for (int i = 0; i < n; ++i) CHECK(std::abs(t.diag[i] - inv(i, i)) < 1e-12);
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(std::abs(t.upper[i] - inv(i, i + 1)) < 1e-12);
      CHECK(std::abs(t.lower[i] - inv(i + 1, i)) < 1e-12);
    }
  }
  std::vector<cplx> d{0.0, 1.0}, u{0.0}, l{0.0};
  CHECK_THROWS_AS(greens::tridiagonal_inverse(d, u, l), SingularInverseError);
}

TEST_CASE("imaginary time: both routes against matrix exponentials") {
  for (auto s : {Statistics::Fermion, Statistics::Boson}) {
    for (double g : {0.0, 0.5, 2.0, 3.5}) {
      auto p = chain(g, 4.0, s, 8);
      const auto res = greens::greens_imag_time(p, {.n_max = 2000, .tau_points = 64});
      CHECK(res.converged);
      CHECK(res.max_deviation <= 10.0 * res.expected_error);
      const double mu = res.spectral.meta().mu;
      const auto ks = model::k_grid(p.n_cells);
      for (int si : {0, 5, 31, 63}) {
        const double tau = res.spectral.meta().s_axis[si];
        std::vector<Eigen::MatrixXcd> gk;
        for (double k : ks)
          gk.push_back(expm_propagator(model::bloch_hamiltonian(p, k).matrix, mu, tau, p.beta, s));
        for (int r = 0; r < p.n_cells; ++r) {
          Eigen::Matrix2cd want = Eigen::Matrix2cd::Zero();
          for (std::size_t x = 0; x < ks.size(); ++x) want += std::exp(I * (ks[x] * r)) * gk[x];
          want /= double(p.n_cells);
          const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              CHECK(std::abs(res.spectral(i, j, r, si) - want(i, j)) < 1e-9 * scale);
              CHECK(std::abs(res.matsubara_sum(i, j, r, si) - want(i, j)) < 1e-6);
            }
        }
      }
    }
  }
}

TEST_CASE("imaginary time: open chain against matrix exponentials") {
  // off resonance: near a pole 1 + e^{-beta A} is too ill-conditioned for expm
  ModelParams p = chain(1.0, 2.0, Statistics::Fermion, 6);
  p.boundary = Boundary::Open;
  for (double t2 : {0.5, 2.0}) {
    p.t2 = t2;
    const auto res = greens::greens_imag_time(p, {.n_max = 4000, .tau_points = 32});
    CHECK(res.converged);
    const Eigen::MatrixXcd h = model::open_hamiltonian(p).matrix;
    for (int si : {0, 7, 31}) {
      const double tau = res.spectral.meta().s_axis[si];
      const Eigen::MatrixXcd want = expm_propagator(h, res.spectral.meta().mu, tau, p.beta, p.statistics);
      for (int c = 0; c < p.n_cells; ++c)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(res.spectral(i, j, c, si) - want(2 * c + i, 2 * c + j)) < 1e-8);
            CHECK(std::abs(res.matsubara_sum(i, j, c, si) - want(2 * c + i, 2 * c + j)) < 1e-5);
          }
    }
  }
  p.statistics = Statistics::Boson;
  CHECK_THROWS_AS(greens::greens_imag_time_obc(p), InvalidParameters);
}

TEST_CASE("KMS boundary condition") {
  for (auto s : {Statistics::Fermion, Statistics::Boson}) {
    const auto p = chain(2.0, 2 * pi, s, 16);
    const auto res = greens::greens_imag_time(p, {.n_max = 4000, .tau_points = 256});
    const double mu = res.spectral.meta().mu;
    const auto ks = model::k_grid(p.n_cells);
    // G(0+) - zeta G(beta-) = 1 at r = 0, zero elsewhere
    for (int r : {0, 1, 5}) {
      Eigen::Matrix2cd late = Eigen::Matrix2cd::Zero();
      for (double k : ks)
        late += std::exp(I * (k * r)) *
                expm_propagator(model::bloch_hamiltonian(p, k).matrix, mu, p.beta, p.beta, s);
      late /= double(p.n_cells);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const cplx jump = res.matsubara_sum(i, j, r, 0) - statistics_sign(s) * late(i, j);
          const double want = (r == 0 && i == j) ? 1.0 : 0.0;
          CHECK(std::abs(jump - want) < 1e-6);
        }
    }
    // per-mode form of the same statement
    const cplx xi(0.3, 1.7);
    const cplx g0 = greens::mode_propagator(xi, 0.0, p.beta, s);
    const cplx gb = std::exp(-xi * p.beta) * g0;
    CHECK(std::abs(g0 - statistics_sign(s) * gb - 1.0) < 1e-14);
  }
}

TEST_CASE("raw series converges to the midpoint of the jump at tau = 0") {
  const auto p = chain(0.0, 2.0, Statistics::Fermion, 4);
  const auto raw = greens::greens_imag_time(p, {.n_max = 20000, .tau_points = 64, .tail_correction = false});
  CHECK(raw.converged);
  // fermions: (G(0+) + G(0-)) / 2 = G(0+) - 1/2 on the diagonal
  CHECK(std::abs(raw.matsubara_sum(0, 0, 0, 0) - (raw.spectral(0, 0, 0, 0) - 0.5)) < 1e-3);
}

TEST_CASE("hermitian limits and monotone bosons") {
  ModelParams p = chain(0.0, 3 * pi, Statistics::Fermion, 10);
  p.boundary = Boundary::Open;
  const auto obc = greens::greens_imag_time(p, {.n_max = 2000, .tau_points = 64});
  double worst = 0.0;
  for (cplx v : obc.spectral.values()) worst = std::max(worst, std::abs(v.imag()));
  CHECK(worst < 1e-12);
  CHECK(analysis::dominant_modes(obc.spectral).peaks.empty());

  const auto weak = chain(0.5, 2 * pi, Statistics::Boson, 40);
  const auto res = greens::greens_imag_time(weak, {.n_max = 1000, .tau_points = 128});
  for (int i = 0; i < 2; ++i) {
    const auto series = res.spectral.series(i, i, 0);
    for (std::size_t s = 1; s < series.size(); ++s)
      CHECK(std::abs(series[s]) <= std::abs(series[s - 1]) * (1 + 1e-12));
  }
}

TEST_CASE("real time at t = 0 is the thermal correlator") {
  const auto p = chain(0.0, 2.0, Statistics::Fermion, 12);
  const std::vector<double> ts{0.0, 0.5};
  const auto g = greens::greens_real_time(p, ts);
  const auto ks = model::k_grid(p.n_cells);
  const double mu = g.meta().mu;
  for (int r : {0, 3}) {
    Eigen::Matrix2cd want = Eigen::Matrix2cd::Zero();
    for (double k : ks) {
      const Eigen::Matrix2cd h = model::bloch_hamiltonian(p, k).matrix;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
      Eigen::Vector2cd f;
      for (int m = 0; m < 2; ++m) f(m) = 1.0 / (std::exp(p.beta * (es.eigenvalues()(m) - mu)) + 1.0);
      want += std::exp(I * (k * r)) * (es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint());
    }
    want /= double(p.n_cells);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(g(i, j, r, 0) - want(i, j)) < 1e-13);
  }
  ModelParams obc = p;
  obc.boundary = Boundary::Open;
  CHECK_THROWS_AS(greens::greens_real_time(obc, ts), InvalidParameters);
}

TEST_CASE("tensor bookkeeping") {
  greens::GreensTensor a(greens::Domain::SpaceTau, 3, 4, {});
  greens::GreensTensor b(greens::Domain::SpaceTau, 3, 4, {});
  a(1, 0, 2, 3) = 2.0;
  CHECK(a.series(1, 0, 2)[3] == cplx(2.0));
  CHECK(a.max_abs_difference(b) == 2.0);
  CHECK_THROWS_AS(greens::GreensTensor(greens::Domain::SpaceTau, 0, 4, {}), InvalidParameters);
  CHECK(greens::tau_grid(2.0, 4) == std::vector<double>{0.0, 0.5, 1.0, 1.5});
}
