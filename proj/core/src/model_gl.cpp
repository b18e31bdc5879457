#include "hamspec/model_gl.hpp"

#include <cmath>
#include <stdexcept>

#include "hamspec/linop.hpp"

namespace hamspec {

double potential_U(double psi, const GLModel& model) {
  const double a2 = model.vacuum * model.vacuum;
  const double q = psi * psi - a2;
  return model.mass * model.mass / (8.0 * a2) * q * q;
}

double nonlinearity_F(double psi, const GLModel& model) {
  const double a2 = model.vacuum * model.vacuum;
  return model.mass * model.mass / (2.0 * a2) * psi * (a2 - psi * psi);
}

KinkProfile kink_profile(const Grid1D& grid, const GLModel& model) {
  if (!(model.vacuum > 0.0) || !(model.mass > 0.0)) {
    throw std::invalid_argument("kink_profile: model requires a > 0 and m > 0");
  }
  const double a = model.vacuum;
  const double m = model.mass;
  const int n = grid.n_points;
  const int last = n - 1;

  KinkProfile k;
  k.model = model;
  k.grid = grid;
  k.values.resize(n);
  k.derivative.resize(n);
  // Fill symmetric halves from the same |x| so oddness of s₀ and evenness of
  // s₀' hold exactly in floating point.
  for (int i = 0; i <= last / 2; ++i) {
    const double x = grid.points[last - i];  // x >= 0
    const double t = std::tanh(0.5 * m * x);
    // 1 - t² would flush to zero once tanh saturates; the direct form keeps
    // the derivative strictly positive out to the wall.
    const double sech = 1.0 / std::cosh(0.5 * m * x);
    const double sech2 = sech * sech;
    k.values[last - i] = a * t;
    k.values[i] = -a * t;
    k.derivative[last - i] = 0.5 * a * m * sech2;
    k.derivative[i] = 0.5 * a * m * sech2;
  }

  // The vacua must be essentially reached at the boundary, otherwise the
  // Dirichlet truncation is meaningless for this model.
  const double tail = a - std::abs(k.values[last]);
  if (tail > 0.05 * a) {
    throw std::domain_error("kink_profile: grid too short, kink does not reach ±a");
  }

  // Gross sanity check of the stationary equation s₀'' + F(s₀) = 0 on
  // interior points (the sharp O(h²) statement is exercised by tests).
  const SymOperator d2 = second_derivative(grid);
  const Vec ds = apply_sym(d2, k.values);  // ≈ -s₀''
  double max_res = 0.0;
  for (int i = 1; i < last; ++i) {
    max_res = std::max(max_res, std::abs(-ds[i] + nonlinearity_F(k.values[i], model)));
  }
  if (max_res > 0.1 * a * m * m) {
    throw std::domain_error("kink_profile: stationary-equation residual too large");
  }
  return k;
}

bool kink_grid_adequate(const Grid1D& grid, const GLModel& model) {
  return model.mass * grid.half_length >= 10.0;
}

Vec linearization_potential(const KinkProfile& kink) {
  const double a2 = kink.model.vacuum * kink.model.vacuum;
  const double m2 = kink.model.mass * kink.model.mass;
  const int n = kink.values.size();
  Vec V(n);
  for (int i = 0; i < n; ++i) {
    // -F'(s₀) - m² = (3m²/2)(s₀²/a² - 1); even because s₀ is exactly odd.
    V[i] = 1.5 * m2 * (kink.values[i] * kink.values[i] / a2 - 1.0);
  }
  return V;
}

AdaptedPotential grid_adapted_potential(const KinkProfile& kink) {
  const Grid1D& grid = kink.grid;
  const double m = kink.model.mass;
  const double a = kink.model.vacuum;
  const double h = grid.spacing;
  const double h2 = h * h;
  const int n = grid.n_points;
  const Vec& u = kink.derivative;  // s₀' > 0 everywhere

  // Ghost values one step beyond ±L come from the analytic tail, so the
  // potential stays spike-free at the walls; the kernel identity then holds
  // to the size of those tails (~e^{-mL}) rather than bit-exactly.
  const double xg = grid.half_length + h;
  // sech² form: 1 - tanh² flushes to zero once tanh saturates, which would
  // silently zero the ghost and reintroduce the wall spike.
  const double sg = 1.0 / std::cosh(0.5 * m * xg);
  const double ghost = 0.5 * a * m * sg * sg;

  const double sh = std::sinh(0.5 * m * h);
  AdaptedPotential ap;
  ap.mass_shift = 4.0 / h2 * sh * sh - m * m;
  ap.effective_mass = std::sqrt(m * m + ap.mass_shift);
  ap.values.resize(n);
  for (int i = 0; i < n; ++i) {
    const double um = (i > 0) ? u[i - 1] : ghost;
    const double up = (i + 1 < n) ? u[i + 1] : ghost;
    const double d2u = (2.0 * u[i] - um - up) / h2;  // (-d²/dx²) s₀'
    const double vstar = -d2u / u[i] - m * m;
    ap.values[i] = vstar - ap.mass_shift;
  }
  // Symmetrize: the formula is even in exact arithmetic; enforce it exactly.
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (ap.values[i] + ap.values[n - 1 - i]);
    ap.values[i] = v;
    ap.values[n - 1 - i] = v;
  }
  return ap;
}

DecayFit verify_decay(const Vec& V, const Grid1D& grid, double x_min,
                      double x_max) {
  DecayFit fit;
  if (x_min < 0.0) x_min = 0.5 * grid.half_length;
  // Accumulate the least-squares fit of log|V| = log C - κ|x| over the tail
  // window x_min < |x| < x_max (both sides folded together by |x|).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  // Ignore tail values that sit at the floating-point noise floor of the
  // input (they would flatten the fitted slope without carrying information).
  const double floor = std::max(1e-300, 1e-13 * V.cwiseAbs().maxCoeff());
  for (int i = 0; i < grid.n_points; ++i) {
    const double ax = std::abs(grid.points[i]);
    if (ax <= x_min || ax >= x_max) continue;
    const double av = std::abs(V[i]);
    if (av < floor) continue;
    const double ly = std::log(av);
    sx += ax;
    sy += ly;
    sxx += ax * ax;
    sxy += ax * ly;
    ++count;
  }
  if (count < 4) {
    return fit;  // not enough usable tail data: report non-decaying
  }
  const double denom = count * sxx - sx * sx;
  const double slope = (count * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / count;
  fit.kappa = -slope;
  fit.C = std::exp(intercept);
  // Default acceptance threshold for "exponentially decaying": rates at or
  // below 0.1 (e.g. polynomial tails fit this slowly) count as violations.
  fit.decaying = fit.kappa > 0.1;
  return fit;
}

}  // namespace hamspec
