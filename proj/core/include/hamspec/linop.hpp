#pragma once

#include <functional>
#include <string>

#include "hamspec/grid.hpp"
#include "hamspec/types.hpp"

namespace hamspec {

/// Real symmetric matrix standing for a discretized selfadjoint operator.
/// `tridiagonal` marks the common Schrödinger case -d²/dx² + diag(...), for
/// which matrix-vector products and the eigensolve use O(N) / banded paths.
struct SymOperator {
  Mat matrix;
  Grid1D grid;
  std::string label;
  bool tridiagonal = false;
};

/// Second-order Dirichlet stencil for -d²/dx²: diagonal 2/h², off-diagonal
/// -1/h² (ghost values beyond ±L are zero).
SymOperator second_derivative(const Grid1D& grid);

/// S = -d²/dx² + m² + V(x) on the grid; throws on length mismatch.
SymOperator assemble_S(const Grid1D& grid, double m, const Vec& V);

/// Matrix-vector product using the banded fast path when available.
Vec apply_sym(const SymOperator& S, const Vec& x);
CVec apply_sym(const SymOperator& S, const CVec& x);

/// Full eigendecomposition of a SymOperator with kernel bookkeeping.
///
/// `kernel_tol` is relative: the absolute threshold is kernel_tol * max|λ|,
/// and eigenvalues inside [-abs, +abs] count as kernel. `gap` is the smallest
/// eigenvalue above the threshold (0 if none).
struct SpectralData {
  Vec eigenvalues;        ///< ascending
  Mat eigenvectors;       ///< orthonormal columns, S V = V diag(λ)
  int kernel_dim = 0;     ///< #{ |λ| < kernel_tol_abs }
  double gap = 0.0;       ///< min { λ : λ > kernel_tol_abs }
  double kernel_tol = 0.0;      ///< relative tolerance as given
  double kernel_tol_abs = 0.0;  ///< kernel_tol * max|λ|
  Grid1D grid;            ///< carried along for operator-valued results
  std::string label;
};

/// Dense/banded symmetric eigensolve; throws std::runtime_error on
/// non-convergence. kernel_tol is relative (see SpectralData).
SpectralData spectral_decompose(const SymOperator& S, double kernel_tol = 1e-8);

/// Λ = V diag(√λ clamped) Vᵀ with the clamp window [-tol_abs, tol_abs] → 0,
/// so Ker Λ equals the detected kernel exactly. Eigenvalues below -tol_abs
/// violate nonnegativity and throw std::domain_error.
SymOperator psd_sqrt(const SpectralData& sd);

/// Λ₊⁻¹ = V diag(λ^{-1/2} above the threshold, else 0) Vᵀ: inverts Λ on its
/// range and annihilates the kernel. Throws std::domain_error when the
/// spectral gap is not resolved (gap <= kernel_tol_abs).
SymOperator pinv_sqrt(const SpectralData& sd);

/// Orthogonal projectors onto the kernel (P0) and its complement (Pplus).
struct Projectors {
  Mat P0;
  Mat Pplus;
};
Projectors projectors(const SpectralData& sd);

/// V diag(f(λ)) Vᵀ x without forming the matrix. Used for the spectral
/// calculus of S (square roots, trig propagators) at large N.
Vec spectral_apply(const SpectralData& sd, const std::function<double(double)>& f,
                   const Vec& x);
CVec spectral_apply(const SpectralData& sd, const std::function<double(double)>& f,
                    const CVec& x);

/// p(S)·x for the degree-`degree` Chebyshev approximation of √λ on
/// [lambda_lo, lambda_hi], evaluated by the Clenshaw recurrence with banded
/// products only. This gives a *local* realization of √S: the result at a
/// point depends on ~degree neighboring points, so interior values are free
/// of boundary pollution provided x's spectral content sits in the window.
Vec sqrt_apply_local(const SymOperator& S, const Vec& x, double lambda_lo,
                     double lambda_hi, int degree = 350);
CVec sqrt_apply_local(const SymOperator& S, const CVec& x, double lambda_lo,
                      double lambda_hi, int degree = 350);

}  // namespace hamspec
