#pragma once
// Independent oracles for the solution map of psi'' = -S psi, plus the
// comparison harness that turns two trajectories into residual reports.
//
// The symplectic integrator deliberately avoids every spectral code path
// (no eigendecomposition, banded products only), so agreement between the
// two oracles certifies the eigensolver-based propagators rather than
// restating them.

#include <functional>
#include <vector>

#include "hamspec/gl_system.hpp"
#include "hamspec/grid.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/types.hpp"

namespace hamspec {

/// Sampled trajectory of the block system. `states` holds X = (ψ, π) as
/// length-2N vectors aligned with `times`; `energies` records the quadratic
/// form ⟨BX, X⟩ = h·(ψᴴSψ + ‖π‖²) at each sample — the uniform-weight
/// pairing, which is the energy the discrete flow conserves exactly (the
/// trapezoid end-correction does not commute with S at the walls).
struct Trajectory {
  std::vector<double> times;
  std::vector<CVec> states;
  std::vector<double> energies;
};

/// Störmer–Verlet (velocity-Verlet) integration of ψ̈ = −Sψ over [0, T]
/// with fixed step dt: a kick–drift–kick update that needs one S·ψ product
/// per step and keeps ψ and π synchronized at integer steps.
///
/// The step count is ceil(T/dt), so the final time is the first multiple of
/// dt at or beyond T (the step size is never shortened — convergence fits
/// rely on a uniform dt). Samples are recorded at step 0, then every
/// `record_stride`-th step, and always at the final step.
///
/// Stability: dt must satisfy dt·√λ_max < 2. The bound uses the Gershgorin
/// row-sum estimate of λ_max(S) (an upper bound, so the check is safe but
/// slightly conservative); violations throw std::invalid_argument, as do
/// non-positive dt or T.
Trajectory leapfrog(const SymOperator& S, const CVec& psi0, const CVec& psidot0,
                    double dt, double T, int record_stride = 1);

/// Exact solution of ψ̈ = −Sψ through the eigenbasis:
///   ψ(t)  = cos(√S t) ψ0 + sinc(√S t)·t ψ̇0,
///   ψ̇(t) = −√S sin(√S t) ψ0 + cos(√S t) ψ̇0,
/// where sinc(z) = sin(z)/z is evaluated by its Taylor series for
/// |√λ·t| < 1e−4, so kernel directions reproduce the secular limit
/// ψ0 + t·ψ̇0 without a 0/0. Exact up to eigendecomposition accuracy.
std::pair<CVec, CVec> exact_spectral_propagate(const SpectralData& sd,
                                               const CVec& psi0,
                                               const CVec& psidot0, double t);

/// Builds a Trajectory by sampling `state_at` (a map t ↦ X(t), e.g. the
/// closed-form block propagator or an eigenfunction-expansion partial sum)
/// at the given times, recording ⟨BX, X⟩ along the way.
Trajectory sample_trajectory(const GlBlockSystem& sys,
                             const std::function<CVec(double)>& state_at,
                             const std::vector<double>& times);

/// Per-time residuals between two trajectories on the same time grid, in
/// three topologies: the plain quadrature norm of X, the V-norm
/// ‖ΛX‖ + ‖X‖, and the weighted norm L²_{−s} ⊗ ℂ² (blockwise ⟨x⟩^{−2s}
/// quadrature). Residuals are absolute; `sup_*` are the maxima over time.
struct ResidualReport {
  std::vector<double> x_residual;
  std::vector<double> v_residual;
  std::vector<double> weighted_residual;
  double sup_x = 0.0;
  double sup_v = 0.0;
  double sup_weighted = 0.0;
};

/// Compares two trajectories sample by sample. Throws std::invalid_argument
/// unless the time grids coincide (within 1e−12 absolute) and every pair of
/// states has the system dimension 2N.
ResidualReport compare(const Trajectory& a, const Trajectory& b,
                       const GlBlockSystem& sys, double s = 2.0);

}  // namespace hamspec
