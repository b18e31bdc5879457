#include "hamspec/validate.hpp"

#include <cmath>
#include <stdexcept>

namespace hamspec {

namespace {

/// ⟨BX, X⟩ = h·(ψᴴSψ + ‖π‖²) with the uniform mesh weight. This is the
/// quadratic form the discrete flow conserves exactly; the trapezoid rule's
/// half-weight endpoint rows do not commute with S, so the trapezoid variant
/// picks up a boundary term once waves reach the walls.
double b_energy(const SymOperator& S, const Grid1D& grid, const CVec& psi,
                const CVec& pi) {
  const CVec spsi = apply_sym(S, psi);
  return grid.spacing * (psi.dot(spsi).real() + pi.squaredNorm());
}

/// Gershgorin upper bound for λ_max of a symmetric matrix: max row sum of
/// absolute values. Cheap, deterministic, and independent of the eigensolver.
double gershgorin_max(const SymOperator& S) {
  return S.matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

Trajectory leapfrog(const SymOperator& S, const CVec& psi0, const CVec& psidot0,
                    double dt, double T, int record_stride) {
  const int n = S.grid.n_points;
  if (psi0.size() != n || psidot0.size() != n) {
    throw std::invalid_argument("leapfrog: state/grid length mismatch");
  }
  if (!(dt > 0.0) || !(T > 0.0) || record_stride < 1) {
    throw std::invalid_argument("leapfrog: need dt > 0, T > 0, stride >= 1");
  }
  const double lam_bound = gershgorin_max(S);
  if (dt * std::sqrt(std::max(lam_bound, 0.0)) >= 2.0) {
    throw std::invalid_argument("leapfrog: dt exceeds the stability bound 2/sqrt(lambda_max)");
  }

  const int n_steps = static_cast<int>(std::ceil(T / dt - 1e-12));
  Trajectory traj;
  traj.times.reserve(static_cast<size_t>(n_steps / record_stride) + 2);
  traj.states.reserve(traj.times.capacity());
  traj.energies.reserve(traj.times.capacity());

  CVec psi = psi0;
  CVec pi = psidot0;
  const auto record = [&](int step) {
    traj.times.push_back(step * dt);
    CVec X(2 * n);
    X.head(n) = psi;
    X.tail(n) = pi;
    traj.states.push_back(std::move(X));
    traj.energies.push_back(b_energy(S, S.grid, psi, pi));
  };

  record(0);
  for (int step = 1; step <= n_steps; ++step) {
    // Kick–drift–kick: one force evaluation per step (the closing half-kick
    // reuses the force of the next opening half-kick via the loop order).
    pi -= (0.5 * dt) * apply_sym(S, psi);
    psi += dt * pi;
    pi -= (0.5 * dt) * apply_sym(S, psi);
    if (step % record_stride == 0 || step == n_steps) {
      record(step);
    }
  }
  return traj;
}

std::pair<CVec, CVec> exact_spectral_propagate(const SpectralData& sd,
                                               const CVec& psi0,
                                               const CVec& psidot0, double t) {
  const int n = sd.grid.n_points;
  if (psi0.size() != n || psidot0.size() != n) {
    throw std::invalid_argument("exact_spectral_propagate: length mismatch");
  }
  const auto cos_f = [t](double lam) {
    return std::cos(std::sqrt(std::max(lam, 0.0)) * t);
  };
  // t·sinc(√λ t): series below |√λ·t| = 1e−4 keeps the λ→0 limit (= t)
  // smooth; the crossover error is O(1e−16) relative.
  const auto tsinc_f = [t](double lam) {
    const double z = std::sqrt(std::max(lam, 0.0)) * std::abs(t);
    if (z < 1e-4) {
      const double z2 = z * z;
      return t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    }
    return std::sin(std::sqrt(std::max(lam, 0.0)) * t) / std::sqrt(lam);
  };
  const auto msin_f = [t](double lam) {
    const double r = std::sqrt(std::max(lam, 0.0));
    return -r * std::sin(r * t);
  };

  CVec psi = spectral_apply(sd, cos_f, psi0);
  psi += spectral_apply(sd, tsinc_f, psidot0);
  CVec psidot = spectral_apply(sd, msin_f, psi0);
  psidot += spectral_apply(sd, cos_f, psidot0);
  return {std::move(psi), std::move(psidot)};
}

Trajectory sample_trajectory(const GlBlockSystem& sys,
                             const std::function<CVec(double)>& state_at,
                             const std::vector<double>& times) {
  const int n = sys.n_points;
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  traj.energies.reserve(times.size());
  for (const double t : times) {
    CVec X = state_at(t);
    if (X.size() != 2 * n) {
      throw std::invalid_argument("sample_trajectory: state has wrong dimension");
    }
    traj.energies.push_back(
        b_energy(sys.S, sys.grid, X.head(n).eval(), X.tail(n).eval()));
    traj.states.push_back(std::move(X));
  }
  return traj;
}

ResidualReport compare(const Trajectory& a, const Trajectory& b,
                       const GlBlockSystem& sys, double s) {
  if (a.times.size() != b.times.size() ||
      a.states.size() != a.times.size() ||
      b.states.size() != b.times.size()) {
    throw std::invalid_argument("compare: trajectory layouts differ");
  }
  const int n = sys.n_points;
  ResidualReport rep;
  rep.x_residual.reserve(a.times.size());
  rep.v_residual.reserve(a.times.size());
  rep.weighted_residual.reserve(a.times.size());
  for (size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12) {
      throw std::invalid_argument("compare: time grids differ");
    }
    if (a.states[i].size() != 2 * n || b.states[i].size() != 2 * n) {
      throw std::invalid_argument("compare: state dimension mismatch");
    }
    const CVec d = a.states[i] - b.states[i];
    rep.x_residual.push_back(gl_state_norm(sys, d));
    rep.v_residual.push_back(gl_v_norm(sys, d));
    rep.weighted_residual.push_back(
        std::hypot(weighted_norm(d.head(n), s, sys.grid),
                   weighted_norm(d.tail(n), s, sys.grid)));
    rep.sup_x = std::max(rep.sup_x, rep.x_residual.back());
    rep.sup_v = std::max(rep.sup_v, rep.v_residual.back());
    rep.sup_weighted = std::max(rep.sup_weighted, rep.weighted_residual.back());
  }
  return rep;
}

}  // namespace hamspec
