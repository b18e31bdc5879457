#pragma once
// Structured Hamilton system for the second-order field model: B has the
// block form blockdiag(S, I) and J is the canonical symplectic structure, so
// every derived operator acts blockwise through the spectral calculus of S.
// Nothing (2N)² is ever materialized beyond the eigenvectors of S itself,
// which makes the large discretizations (N ≈ 1600, dim ≈ 3200) tractable
// where the dense HamiltonSystem path is not.
//
// States are stored as length-2N complex vectors X = (ψ, π): position block
// first, momentum block second. The flow is X' = A X with A(ψ, π) = (π, −Sψ).

#include <vector>

#include "hamspec/grid.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/types.hpp"

namespace hamspec {

/// Nonzero bound state of S below the continuum edge: S v = ω² v with
/// 0 < ω < edge. Each contributes a ±ω pair of discrete modes to the
/// expansion.
struct BoundState {
  int index = 0;      ///< column in sd.eigenvectors
  double omega = 0;   ///< positive frequency √λ
};

/// Spectral skeleton of the block system.
struct GlBlockSystem {
  Grid1D grid;
  SymOperator S;      ///< spatial operator (position block of B)
  SpectralData sd;    ///< full eigendecomposition of S
  Vec v0;             ///< unit kernel mode of S (size 0 when no kernel)
  double edge_mass = 0.0;  ///< m with continuum edge m² (effective mass)
  int n_points = 0;   ///< N
  int dim = 0;        ///< 2N
};

/// Build the skeleton; `edge_mass` is the effective mass whose square is the
/// continuum edge of S (used only for classifying bound states). Throws
/// std::domain_error if S has more than one kernel direction (the field
/// model has at most the translation mode).
GlBlockSystem make_gl_block_system(const SymOperator& S, double edge_mass,
                                   double kernel_tol = 1e-8);

/// Bound states of S strictly between the kernel and the continuum edge
/// (λ < edge²·(1 − 1e−3)).
std::vector<BoundState> gl_bound_states(const GlBlockSystem& sys);

/// A X = (π, −S ψ): banded application, no spectral transform.
CVec gl_apply_A(const GlBlockSystem& sys, const CVec& X);

/// B X = (S ψ, π).
CVec gl_apply_B(const GlBlockSystem& sys, const CVec& X);

/// J X = (π, −ψ).
CVec gl_apply_J(const CVec& X);

/// Λ X = (√S ψ, π) through the spectral calculus.
CVec gl_apply_Lambda(const GlBlockSystem& sys, const CVec& X);

/// Λ₊⁻¹ X = (S₊^{−1/2} ψ, π); annihilates the kernel direction.
CVec gl_apply_LambdaPlusInv(const GlBlockSystem& sys, const CVec& X);

/// Z(t) = e^{W t} Z0 with W = Λ J Λ acting as (z₁, z₂) ↦ (√S z₂, −√S z₁):
/// a real 2×2 rotation with angle ω_j t in each spectral plane of S, frozen
/// on the kernel. Equals e^{−iHt} of the dense construction.
CVec gl_propagate_Z(const GlBlockSystem& sys, const CVec& Z0, double t);

/// Exact solution map X(t) of X' = AX:
///   X(t) = Λ₊⁻¹ e^{Wt} Λ X0 + Π_K X0 + t·Φ₀(X0),
/// with Π_K X0 = (P₀ψ₀, 0) the frozen kernel component and
/// Φ₀(X0) = (P₀π₀, 0) the secular direction. (For this block structure the
/// bounded kernel-correction term of the general formula vanishes
/// identically: P H_R⁻¹ ≡ 0.)
CVec gl_reconstruct_X(const GlBlockSystem& sys, const CVec& X0, double t);

/// Secular components of an initial state: Φ₀ = (P₀π₀, 0), Ψ₀ = (0, P₀π₀).
/// X0 = Ψ₀ evolves exactly as t·Φ₀ + Ψ₀.
std::pair<CVec, CVec> gl_secular_components(const GlBlockSystem& sys,
                                            const CVec& X0);

/// Lift of a generalized eigenfunction e of S (S e = ω² e) to an eigenmode
/// of A: a = G h for h = (e, −i·sgn(ω)·e), evaluated analytically as
/// a = (P₊ e / |ω|, −i·sgn(ω)·e). Satisfies A a = −i ω a exactly when e is
/// an exact eigenfunction.
CVec gl_green_apply(const GlBlockSystem& sys, const CVec& e, double omega);

/// V-norm ‖X‖_V = ‖ΛX‖ + ‖X‖ with both pieces measured in the trapezoid
/// quadrature norm over the two blocks.
double gl_v_norm(const GlBlockSystem& sys, const CVec& X);

/// Quadrature norm of a two-block state (no Λ).
double gl_state_norm(const GlBlockSystem& sys, const CVec& X);

}  // namespace hamspec
