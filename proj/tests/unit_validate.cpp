// Oracle cross-checks: the symplectic integrator and the eigenbasis
// propagator are built on disjoint code paths (banded products vs spectral
// calculus), so their mutual agreement at the measured convergence order is
// evidence against systematic errors in either one.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "hamspec/gl_system.hpp"
#include "hamspec/grid.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/model_gl.hpp"
#include "hamspec/validate.hpp"

using namespace hamspec;

namespace {

struct Fixture {
  Grid1D grid;
  GlBlockSystem sys;
  Vec zero_mode;  ///< normalized sampled s₀'
};

const Fixture& fixture() {
  static const Fixture fx = [] {
    Fixture f;
    f.grid = make_grid(20.0, 401);
    const GLModel model{1.0, std::sqrt(2.0)};
    const KinkProfile kink = kink_profile(f.grid, model);
    const AdaptedPotential ap = grid_adapted_potential(kink);
    const SymOperator S = assemble_S(f.grid, ap.effective_mass, ap.values);
    f.sys = make_gl_block_system(S, ap.effective_mass);
    f.zero_mode = kink.derivative / quad_norm(kink.derivative, f.grid);
    return f;
  }();
  return fx;
}

/// Diagonal system on a minimal grid: every component is an independent
/// harmonic oscillator, so the closed-form solution is available per entry.
SymOperator diagonal_operator(const Vec& lambdas) {
  SymOperator S;
  S.grid = make_grid(1.0, static_cast<int>(lambdas.size()));
  S.matrix = lambdas.asDiagonal();
  S.label = "diag";
  S.tridiagonal = true;
  return S;
}

CVec packet_psi(const Grid1D& grid, double center, double width) {
  CVec u(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double x = grid.points[i];
    u[i] = std::exp(-0.5 * std::pow((x - center) / width, 2.0));
  }
  return u;
}

}  // namespace

TEST_SUITE_BEGIN("validate");

TEST_CASE("leapfrog reproduces the harmonic oscillator at second order") {
  const double omega = 2.0;
  const SymOperator S = diagonal_operator(Vec::Constant(3, omega * omega));
  const CVec psi0 = CVec::Constant(3, 1.0);
  const CVec pidot0 = CVec::Constant(3, 0.5);
  const double T = 10.0;

  std::vector<double> errs;
  for (const double dt : {2e-2, 1e-2, 5e-3}) {
    const Trajectory traj = leapfrog(S, psi0, pidot0, dt, T, 1 << 20);
    const double tf = traj.times.back();
    const cplx psi_ref = std::cos(omega * tf) * psi0[0] +
                         std::sin(omega * tf) / omega * pidot0[0];
    const cplx pi_ref = -omega * std::sin(omega * tf) * psi0[0] +
                        std::cos(omega * tf) * pidot0[0];
    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      err = std::max(err, std::abs(traj.states.back()[i] - psi_ref));
      err = std::max(err, std::abs(traj.states.back()[3 + i] - pi_ref));
    }
    errs.push_back(err);
  }
  const double order01 = std::log2(errs[0] / errs[1]);
  const double order12 = std::log2(errs[1] / errs[2]);
  CHECK(order01 > 1.9);
  CHECK(order12 > 1.9);
  CHECK(order01 < 2.2);
}

TEST_CASE("leapfrog rejects unstable steps and bad arguments") {
  const double omega = 2.0;  // Gershgorin bound = ω², stability dt < 2/ω = 1
  const SymOperator S = diagonal_operator(Vec::Constant(3, omega * omega));
  const CVec z = CVec::Zero(3);
  CHECK_THROWS_AS(leapfrog(S, z, z, 1.01, 5.0), std::invalid_argument);
  CHECK_NOTHROW(leapfrog(S, z, z, 0.97, 5.0, 1 << 20));
  CHECK_THROWS_AS(leapfrog(S, z, z, -0.1, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(leapfrog(S, z, z, 0.1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(leapfrog(S, CVec::Zero(2), z, 0.1, 1.0),
                  std::invalid_argument);
}

TEST_CASE("leapfrog keeps the kink zero mode stationary") {
  const Fixture& fx = fixture();
  const CVec psi0 = fx.zero_mode.cast<cplx>();
  const Trajectory traj =
      leapfrog(fx.sys.S, psi0, CVec::Zero(fx.grid.n_points), 0.01, 5.0, 100);
  for (const CVec& X : traj.states) {
    CHECK(quad_norm(CVec(X.head(fx.grid.n_points) - psi0), fx.grid) < 1e-6);
  }
}

TEST_CASE("leapfrog energy drift shrinks by ~4x when dt halves") {
  const Fixture& fx = fixture();
  const CVec psi0 = packet_psi(fx.grid, 1.0, 0.6);
  const CVec pi0 = 0.5 * packet_psi(fx.grid, 0.8, 0.7);

  const auto drift = [&](double dt) {
    const Trajectory traj = leapfrog(fx.sys.S, psi0, pi0, dt, 5.0, 10);
    double worst = 0.0;
    for (const double e : traj.energies) {
      worst = std::max(worst, std::abs(e - traj.energies.front()));
    }
    return worst / traj.energies.front();
  };
  const double ratio = drift(0.02) / drift(0.01);
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
}

TEST_CASE("exact propagator: identity at t=0 and the secular kernel limit") {
  const Fixture& fx = fixture();
  const CVec psi0 = packet_psi(fx.grid, 1.0, 0.6);
  const CVec pi0 = 0.5 * packet_psi(fx.grid, 0.8, 0.7);

  const auto [p0, pd0] = exact_spectral_propagate(fx.sys.sd, psi0, pi0, 0.0);
  CHECK((p0 - psi0).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((pd0 - pi0).cwiseAbs().maxCoeff() < 1e-13);

  // ψ0 = ψ̇0 = kernel vector: the trajectory is the straight line (1+t)·v0.
  const CVec v0 = fx.sys.v0.cast<cplx>();
  const double t = 7.3;
  const auto [ps, pds] = exact_spectral_propagate(fx.sys.sd, v0, v0, t);
  CHECK((ps - (1.0 + t) * v0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((pds - v0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("exact propagator: sinc series window is seamless") {
  // Frequencies straddling the series/direct crossover |√λ·t| = 1e−4.
  const double t = 1.0;
  Vec lams(3);
  lams << std::pow(0.5e-4, 2.0), std::pow(0.99999e-4, 2.0),
      std::pow(2e-4, 2.0);
  const SymOperator S = diagonal_operator(lams);
  const SpectralData sd = spectral_decompose(S);
  const auto [psi, psidot] =
      exact_spectral_propagate(sd, CVec::Zero(3), CVec::Constant(3, 1.0), t);
  for (int i = 0; i < 3; ++i) {
    const double z = std::sqrt(lams[i]) * t;
    const double ref = std::sin(z) / z * t;  // z > 0 here, no 0/0
    CHECK(std::abs(psi[i] - ref) < 1e-14 * std::abs(ref));
    CHECK(std::abs(psidot[i] - std::cos(z)) < 1e-14);
  }
}

TEST_CASE("cross-oracle: eigenbasis propagator equals the block solution map") {
  const Fixture& fx = fixture();
  const int n = fx.grid.n_points;
  CVec X0(2 * n);
  X0.head(n) = packet_psi(fx.grid, 1.0, 0.6);
  X0.tail(n) = 0.5 * packet_psi(fx.grid, 0.8, 0.7);

  for (const double t : {1.0, 5.0, 20.0}) {
    const auto [psi, psidot] = exact_spectral_propagate(
        fx.sys.sd, X0.head(n).eval(), X0.tail(n).eval(), t);
    const CVec want = gl_reconstruct_X(fx.sys, X0, t);
    CHECK(quad_norm(CVec(psi - want.head(n)), fx.grid) < 1e-8);
    CHECK(quad_norm(CVec(psidot - want.tail(n)), fx.grid) < 1e-8);
  }
}

TEST_CASE("leapfrog converges to the exact propagator at order >= 1.9") {
  const Fixture& fx = fixture();
  const int n = fx.grid.n_points;
  const CVec psi0 = packet_psi(fx.grid, 1.0, 0.6);
  const CVec pi0 = 0.5 * packet_psi(fx.grid, 0.8, 0.7);
  const double T = 5.0;
  const auto [psi_ref, psidot_ref] =
      exact_spectral_propagate(fx.sys.sd, psi0, pi0, T);

  std::vector<double> errs;
  for (const double dt : {1e-2, 5e-3, 2.5e-3}) {
    const Trajectory traj = leapfrog(fx.sys.S, psi0, pi0, dt, T, 1 << 20);
    REQUIRE(traj.times.back() == doctest::Approx(T).epsilon(1e-12));
    const CVec& Xf = traj.states.back();
    errs.push_back(
        std::hypot(quad_norm(CVec(Xf.head(n) - psi_ref), fx.grid),
                   quad_norm(CVec(Xf.tail(n) - psidot_ref), fx.grid)));
  }
  CHECK(std::log2(errs[0] / errs[1]) > 1.9);
  CHECK(std::log2(errs[1] / errs[2]) > 1.9);
}

TEST_CASE("exact propagator conserves the energy form to rounding") {
  const Fixture& fx = fixture();
  const int n = fx.grid.n_points;
  CVec X0(2 * n);
  X0.head(n) = packet_psi(fx.grid, 1.0, 0.6);
  X0.tail(n) = 0.5 * packet_psi(fx.grid, 0.8, 0.7);

  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) {
    times.push_back(2.0 * k);
  }
  const Trajectory traj = sample_trajectory(
      fx.sys, [&](double t) { return gl_reconstruct_X(fx.sys, X0, t); }, times);
  for (const double e : traj.energies) {
    CHECK(std::abs(e - traj.energies.front()) < 1e-9 * traj.energies.front());
  }
}

TEST_CASE("compare: zero on identical data, weighted below plain, guards") {
  const Fixture& fx = fixture();
  const int n = fx.grid.n_points;
  CVec X0(2 * n);
  X0.head(n) = packet_psi(fx.grid, 1.0, 0.6);
  X0.tail(n) = 0.5 * packet_psi(fx.grid, 0.8, 0.7);
  const std::vector<double> times{0.0, 1.0, 2.0};
  const auto at = [&](double t) { return gl_reconstruct_X(fx.sys, X0, t); };
  const Trajectory a = sample_trajectory(fx.sys, at, times);

  const ResidualReport same = compare(a, a, fx.sys);
  CHECK(same.sup_x == 0.0);
  CHECK(same.sup_v == 0.0);
  CHECK(same.sup_weighted == 0.0);

  // Against the leapfrog trajectory on the same time grid: residuals are
  // positive; the ⟨x⟩-weighted one can only lose mass relative to plain L².
  Trajectory b = leapfrog(fx.sys.S, X0.head(n), X0.tail(n), 1e-3, 2.0, 1000);
  const ResidualReport rep = compare(a, b, fx.sys);
  CHECK(rep.sup_x > 0.0);
  CHECK(rep.sup_v >= rep.sup_x);  // V-norm adds the Λ-image term
  for (size_t i = 0; i < rep.x_residual.size(); ++i) {
    CHECK(rep.weighted_residual[i] <= rep.x_residual[i] + 1e-15);
  }

  Trajectory shifted = a;
  shifted.times[1] += 1e-6;
  CHECK_THROWS_AS(compare(a, shifted, fx.sys), std::invalid_argument);
  Trajectory short_traj = a;
  short_traj.times.pop_back();
  short_traj.states.pop_back();
  CHECK_THROWS_AS(compare(a, short_traj, fx.sys), std::invalid_argument);
}

TEST_SUITE_END();
