#pragma once

#include <limits>

#include "hamspec/grid.hpp"
#include "hamspec/types.hpp"

namespace hamspec {

/// Double-well model with vacua ±a and curvature U''(±a) = m²:
///     U(ψ) = (m²/(8a²))(ψ² − a²)²,   F(ψ) = −U'(ψ).
/// This family has a closed-form kink a·tanh(m x / 2) whose linearization
/// potential is the reflectionless −(3m²/2) sech²(m x / 2), which is what all
/// analytic oracles in the test suite lean on.
struct GLModel {
  double vacuum = 1.0;  ///< a > 0
  double mass = 0.0;    ///< m > 0, squared curvature of the wells
};

double potential_U(double psi, const GLModel& model);

/// F(ψ) = −U'(ψ) = (m²/(2a²)) ψ (a² − ψ²).
double nonlinearity_F(double psi, const GLModel& model);

/// The static kink and its derivative sampled on a grid.
/// values  = a·tanh(m x / 2)  — odd, strictly increasing, → ±a;
/// derivative = (a m / 2) sech²(m x / 2) — strictly positive, even.
struct KinkProfile {
  GLModel model;
  Grid1D grid;
  Vec values;
  Vec derivative;
};

/// Samples the closed-form kink and checks that the vacua are reached at the
/// boundary (throws std::domain_error when the grid is too short for the
/// kink to flatten out, i.e. the tails exceed tolerance).
KinkProfile kink_profile(const Grid1D& grid, const GLModel& model);

/// True when m·L is large enough (≥ 10) for tail-sensitive computations;
/// callers may warn otherwise.
bool kink_grid_adequate(const Grid1D& grid, const GLModel& model);

/// V₀(x) = −F'(s₀(x)) − m² = −(3m²/2) sech²(m x / 2): even, exponentially
/// decaying linearization potential around the kink.
Vec linearization_potential(const KinkProfile& kink);

/// Discretization of V₀ adapted to the three-point stencil so that the
/// sampled zero mode s₀' lies in the kernel of the assembled operator to
/// machine accuracy (the only leftover is the analytic ghost tail ~e^{−mL}):
///     V*_i = −(D₂ s₀')_i / s₀'_i − m²   (s₀' > 0, so this is well defined),
/// where D₂ is the positive −d²/dx² stencil. V* tends to the constant
/// c_h = (4/h²)sinh²(m h/2) − m² = m⁴h²/12 + O(h⁴) at infinity (the lattice
/// dispersion shift), which is split off into an effective mass so the
/// remaining potential decays like e^{−m|x|}:
///     values = V* − c_h,  effective_mass² = m² + c_h.
/// Assemble with assemble_S(grid, effective_mass, values).
struct AdaptedPotential {
  Vec values;              ///< decaying part of V*
  double mass_shift = 0;   ///< c_h
  double effective_mass = 0;  ///< sqrt(m² + c_h)
};
AdaptedPotential grid_adapted_potential(const KinkProfile& kink);

/// Least-squares fit of log|V| against |x| on the tail window
/// x_min < |x| < x_max (default: |x| > L/2), estimating |V(x)| ≤ C e^{−κ|x|}.
/// `decaying` is false when the fitted κ ≤ 0.1 (or the tail is numerically
/// zero), i.e. the decay hypothesis fails. Callers working with data whose
/// far tail sits at the rounding noise floor should cap x_max where the
/// signal is still resolvable.
struct DecayFit {
  double kappa = 0.0;
  double C = 0.0;
  bool decaying = false;
};
DecayFit verify_decay(const Vec& V, const Grid1D& grid, double x_min = -1.0,
                      double x_max = std::numeric_limits<double>::infinity());

}  // namespace hamspec
