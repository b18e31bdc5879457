#pragma once
// Dense linear-Hamiltonian machinery: systems X' = A X with A = J B, where
// B = B* ≥ 0 may have a kernel and J is an invertible skew-symmetric real
// structure with J² = −1. The square-root substitution Z = Λ X (Λ = B^{1/2})
// turns the dynamics into a self-adjoint problem H = Λ i J Λ on Ran Λ, plus a
// finite secular (polynomial-in-t) part coming from Ker H ∩ Ran Λ. Everything
// here materializes dense matrices and is intended for moderate dimensions
// (n ≲ 400); the large translation-invariant block systems use the dedicated
// structured path instead.

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hamspec/linop.hpp"
#include "hamspec/types.hpp"

namespace hamspec {

/// Dense Hamiltonian system with all derived operators materialized.
///
/// Derived pieces (phase space dimension n):
///  - Lambda        = B^{1/2}            (symmetric PSD)
///  - LambdaPlusInv = pseudo-inverse of Lambda (zero on Ker B)
///  - H             = Lambda (iJ) Lambda (complex Hermitian)
///  - Pi_K  : orthogonal projection onto Ker Λ = Ker B (the frozen component)
///  - Pi_scriptR = I − Pi_K : projection onto Ran Λ
///  - Pi_0  : projection onto Ker H ∩ Ran Λ (the subspace that feeds the
///    linear-in-t secular growth)
///  - Pi_R  : Pi_scriptR − Pi_0 = projection onto Ran H (the oscillatory part)
///  - P     : the finite-rank map Pi_K J Lambda (rank ≤ dim Ker B)
///  - G     : LambdaPlusInv Pi_scriptR + i P H_R⁻¹ Pi_R, the "lift" used to
///    map spectral data of H back to eigenmodes of A; real, because
///    i H_R⁻¹ = W⁺ with W = Λ J Λ real skew.
struct HamiltonSystem {
  int dim = 0;      ///< phase-space dimension n
  Mat J;            ///< skew structure, J² = −1
  Mat B;            ///< symmetric PSD energy operator
  Mat A;            ///< generator A = J B
  Mat Lambda;       ///< B^{1/2}
  Mat LambdaPlusInv;///< pseudo-inverse of Λ
  CMat H;           ///< Λ iJ Λ, Hermitian
  Mat Pi_K;         ///< projection onto Ker Λ
  Mat Pi_scriptR;   ///< I − Pi_K, projection onto Ran Λ
  Mat Pi_0;         ///< projection onto Ker H ∩ Ran Λ
  Mat Pi_R;         ///< Pi_scriptR − Pi_0, projection onto Ran H
  Mat P;            ///< Pi_K J Λ (finite rank)
  Mat G;            ///< Λ₊⁻¹ Pi_scriptR + i P H_R⁻¹ Pi_R (real)

  // Internals kept for spectral propagation and diagnostics.
  Vec h_eigenvalues;    ///< eigenvalues of H (real, symmetric about 0)
  CMat h_eigenvectors;  ///< unitary eigenbasis of H
  Mat b_kernel_basis;   ///< orthonormal basis of Ker B (n × dim Ker B)
  double kernel_tol = 0.0;
  double kernel_tol_abs_B = 0.0;  ///< absolute kernel threshold used for B
  double kernel_tol_abs_H = 0.0;  ///< absolute kernel threshold used for H
  double b_gap = 0.0;             ///< smallest nonzero eigenvalue of B
};

/// Report of the structural admissibility checks for (J, B).
struct ConditionReport {
  double gap_delta = 0.0;     ///< smallest nonzero eigenvalue of B
  int kernel_dim = 0;         ///< dim Ker B
  bool cond3_ok = false;      ///< secular subspace finite & well-separated
  double cond3_residual = 0.0;///< norm of Pi_K A Pi_K restricted leak
  double cond4_residual = 0.0;///< Hermiticity defect of H (relative)
  double gap_epsilon_H = 0.0; ///< smallest nonzero |eigenvalue| of H
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Jordan-structure summary of A on its generalized kernel.
struct JordanData {
  int block_count = 0;  ///< number of 2×2 nilpotent blocks = dim Ker H ∩ Ran Λ
  Mat kernel_A_basis;   ///< orthonormal basis of Ker A = Ker B (n × dim Ker A)
  /// Secular pairs (Φ, Ψ) built from each unit vector ζ of Ker H ∩ Ran Λ as
  /// Φ = P ζ, Ψ = Λ₊⁻¹ ζ; they satisfy A Ψ = Φ and A Φ = 0 exactly in exact
  /// arithmetic, one pair per 2×2 block.
  std::vector<std::pair<Vec, Vec>> secular_pairs;
  int dim_ker_HR = 0;       ///< dim (Ker H ∩ Ran Λ), equals block_count
  double chain2_residual = 0.0;  ///< max over pairs of ‖AΨ−Φ‖, ‖AΦ‖ (rel. ‖A‖)
  double chain3_residual = 0.0;  ///< min over pairs of dist(Ψ, Ran A)/‖Ψ‖
  bool chain3_excluded = true;   ///< no w solves A w = Ψ (residual above 1e−6)
};

/// Assemble the full derived-operator set from a structure pair (J, B).
/// Throws std::invalid_argument on shape mismatch, non-skew J, asymmetric B,
/// or J² ≠ −1; throws std::domain_error if B has an eigenvalue below
/// −kernel_tol·‖B‖.
HamiltonSystem assemble_system(const Mat& J, const Mat& B,
                               double kernel_tol = 1e-8);

/// Dense second-order field system built from a spatial operator S:
/// B = blockdiag(S, I), J = [[0, I], [−I, 0]] in (position, momentum) blocks.
/// The assembled H is cross-checked against its block closed form
/// i·[[0, √S], [−√S, 0]] and the projectors against their block formulas.
/// Intended for moderate N (materializes (2N)² dense matrices).
HamiltonSystem assemble_gl_system(const SymOperator& S, double kernel_tol = 1e-8);

/// Run the admissibility checks and measure the structural constants.
ConditionReport check_conditions(const HamiltonSystem& sys);

/// Deterministic random admissible system: J is a random orthogonal conjugate
/// of the canonical skew form (n must be even), B is a random symmetric PSD
/// matrix with `kernel_dim` zero eigenvalues and remaining spectrum in
/// [gap, 10·gap]. Ker B is in generic position relative to J. Reproducible
/// across platforms for a fixed seed.
HamiltonSystem random_system(int n, int kernel_dim, double gap,
                             std::uint64_t seed, double kernel_tol = 1e-8);

/// Z = Λ X.
CVec krein_substitute(const HamiltonSystem& sys, const CVec& X);

/// e^{−iHt} Z via the stored eigendecomposition of H.
CVec propagate_Z(const HamiltonSystem& sys, const CVec& Z, double t);

/// Full solution map: X(t) from X(0), combining the conjugated unitary flow,
/// the frozen kernel component, the secular drift t·P Π₀ Λ X₀, and the
/// bounded correction i P (e^{−iH_R t} − 1) H_R⁻¹ Π_R Λ X₀.
CVec reconstruct_X(const HamiltonSystem& sys, const CVec& X0, double t);

/// The finite-rank operator P = Π_K J Λ as a dense matrix (alias of sys.P,
/// recomputed from first principles for cross-checks).
Mat operator_P(const HamiltonSystem& sys);

/// The lift G = Λ₊⁻¹ Π_scriptR + i P H_R⁻¹ Π_R (alias of sys.G, recomputed).
Mat green_operator(const HamiltonSystem& sys);

/// Jordan normal-form data of A on its generalized kernel: Ker A, the count
/// of 2×2 blocks, and explicit secular pairs.
JordanData jordan_structure(const HamiltonSystem& sys);

/// Dense matrix exponential e^{At} X0 (scaling-and-squaring Padé). Reference
/// oracle for the solution map; O(n³) per call.
CVec expm_apply(const Mat& A, const CVec& X0, double t);

}  // namespace hamspec
