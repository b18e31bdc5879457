#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "commands.hpp"
#include "hamspec/continuum.hpp"
#include "hamspec/expansion.hpp"
#include "hamspec/krein.hpp"
#include "hamspec/model_gl.hpp"
#include "hamspec/validate.hpp"

namespace hamspec::cli {
namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return std::string(buf);
}

/// Uniform double in [0, 1) from raw mt19937_64 bits (bit-stable across
/// platforms, unlike the std distributions).
double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

CVec random_cvec(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = cplx(draw_unit(rng) - 0.5, draw_unit(rng) - 0.5);
  }
  return v;
}

/// Kink linearization potential −(3m²/2)·sech²(m x/2) sampled analytically
/// (the scattering-side criteria compare against closed forms derived for
/// this exact function, so no stencil adaptation here).
Vec analytic_kink_potential(const Grid1D& grid, double m) {
  Vec v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double sech = 1.0 / std::cosh(0.5 * m * grid.points[i]);
    v[i] = -1.5 * m * m * sech * sech;
  }
  return v;
}

/// Closed-form continuum eigenfunction of −d²/dx² + m² − (3m²/2)sech²(mx/2)
/// in the adjoint phase convention produced by the scattering solver.
CVec reflectionless_oracle(const Grid1D& grid, double m, double omega,
                           Parity parity) {
  const double k = std::sqrt(omega * omega - m * m);
  const double kappa = 2.0 * k / m;
  const double rho = std::sqrt((1.0 + kappa * kappa) * (4.0 + kappa * kappa));
  const double phi = std::atan(kappa) + std::atan(kappa / 2.0);
  const cplx gamma = std::exp(I * phi);
  CVec e(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) {
    const double y = 0.5 * m * grid.points[i];
    const double th = std::tanh(y);
    const cplx u = std::exp(I * (kappa * y)) *
                   cplx(3.0 * th * th - (1.0 + kappa * kappa), -3.0 * kappa * th);
    e[i] = gamma * (parity == Parity::odd ? u.imag() : u.real()) / rho;
  }
  return e;
}

/// State shared across criteria so the expensive fixtures (production
/// eigensolve, continuum family, packet decomposition) are built once.
/// Criteria always study the cubic kink model of the config, whatever
/// potential_mode says — the detector criterion builds its own variants.
struct Shared {
  RunConfig cfg;
  double tol_scale = 1.0;   ///< max(1, (h/0.05)²): discretization allowances
  double omega_eff = 0.0;   ///< coverage clamped to the representable band
  bool coverage_clamped = false;

  std::optional<Pipeline> pipe;
  CVec packet;

  std::optional<ContinuumFamily> family;
  std::optional<ExpansionData> packet_expansion;
  double family_seconds = 0.0;  ///< family build + decompose, billed to C10

  std::optional<HamiltonSystem> dense_kink;  ///< reduced dense system (C4/C6)
  std::optional<JordanData> dense_jordan;

  const Pipeline& pipeline() {
    if (!pipe) pipe.emplace(build_pipeline(cfg));
    if (packet.size() == 0) packet = gaussian_packet(pipe->sys.grid);
    return *pipe;
  }

  const ContinuumFamily& continuum_family() {
    if (!family) {
      const clock_type::time_point start = clock_type::now();
      const Pipeline& p = pipeline();
      LsOptions opts;
      opts.dispersion = DispersionModel::lattice;
      opts.support_radius = std::min(10.0, 0.75 * cfg.L);
      opts.cross_check = false;
      opts.margin = cfg.omega_margin;
      family.emplace(build_family(p.model.potential, p.model.mass, p.sys.grid,
                                  omega_eff, cfg.omega_margin, opts, cfg.panels));
      family_seconds += seconds_since(start);
    }
    return *family;
  }

  const ExpansionData& expansion() {
    if (!packet_expansion) {
      const clock_type::time_point start = clock_type::now();
      const ContinuumFamily& fam = continuum_family();
      packet_expansion.emplace(
          decompose(pipeline().sys, packet, fam, omega_eff));
      family_seconds += seconds_since(start);
    }
    return *packet_expansion;
  }

  const HamiltonSystem& dense_kink_system() {
    if (!dense_kink) {
      const Grid1D g = make_grid(cfg.L, 101);
      const KinkProfile kink = kink_profile(g, GLModel{cfg.a, cfg.m});
      const AdaptedPotential ap = grid_adapted_potential(kink);
      dense_kink.emplace(
          assemble_gl_system(assemble_S(g, ap.effective_mass, ap.values)));
      dense_jordan.emplace(jordan_structure(*dense_kink));
    }
    return *dense_kink;
  }
};

struct Check {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& clause) {
    if (!detail.empty()) detail += "; ";
    detail += clause;
    if (!cond) {
      ok = false;
      detail += " [FAILED]";
    }
  }
};

// --- Criterion 1: kink spectrum ------------------------------------------

void c1_kink_spectrum(Shared& sh, CriterionResult& r) {
  const clock_type::time_point start = clock_type::now();
  const Pipeline& pipe = sh.pipeline();
  const SpectralData& sd = pipe.sys.sd;
  const double m2 = sh.cfg.m * sh.cfg.m;

  const double lambda0 = sd.eigenvalues[0];
  const double lambda1 = sd.eigenvalues[1];
  const double lambda1_target = 0.75 * m2;  // shape mode of the sech² well
  const double edge_err = std::abs(pipe.model.mass * pipe.model.mass - m2);
  const double elapsed = seconds_since(start);

  Check ck;
  ck.require(std::abs(lambda0) < 1e-5 * sh.tol_scale,
             "|lambda0|=" + fmt(std::abs(lambda0)) + " < " +
                 fmt(1e-5 * sh.tol_scale));
  ck.require(std::abs(lambda1 - lambda1_target) < 1e-3 * sh.tol_scale,
             "lambda1=" + fmt(lambda1) + " within " +
                 fmt(1e-3 * sh.tol_scale) + " of " + fmt(lambda1_target));
  ck.require(edge_err < 1e-3 * sh.tol_scale,
             "edge m^2 offset=" + fmt(edge_err) + " < " +
                 fmt(1e-3 * sh.tol_scale));
  if (elapsed >= 30.0) {
    ck.require(false, "eigensolve exceeded the 30 s budget");
  }

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"lambda0", lambda0},
                    {"lambda1", lambda1},
                    {"lambda1_target", lambda1_target},
                    {"edge_m2_offset", edge_err}};
}

// --- Criterion 2: translation zero mode ----------------------------------

void c2_zero_mode(Shared& sh, CriterionResult& r) {
  const Pipeline& pipe = sh.pipeline();
  const Grid1D& grid = pipe.sys.grid;
  const KinkProfile kink = kink_profile(grid, GLModel{sh.cfg.a, sh.cfg.m});

  const CVec z = kink.derivative.cast<cplx>();
  const double residual =
      quad_norm(CVec(apply_sym(pipe.model.S, z)), grid) / quad_norm(z, grid);

  Check ck;
  ck.require(residual < 1e-6,
             "||S s0'||/||s0'||=" + fmt(residual) + " < 1e-6");
  double overlap = 0.0;
  if (pipe.sys.v0.size() > 0) {
    const Vec zhat = kink.derivative.normalized();
    overlap = std::abs(pipe.sys.v0.dot(zhat));
    ck.require(overlap > 1.0 - 1e-6,
               "|<v0, s0'>|=" + fmt(overlap) + " > 1-1e-6");
  } else {
    ck.require(false, "operator has no kernel direction");
  }

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"kernel_residual", residual}, {"overlap", overlap}};
}

// --- Criterion 3: spectral gap of random systems -------------------------

void c3_random_gap(Shared& sh, CriterionResult& r) {
  const clock_type::time_point start = clock_type::now();
  std::mt19937_64 rng(sh.cfg.seed * 0x9e3779b97f4a7c15ull + 3);

  int violations = 0;
  double min_epsilon = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const int n = 4 + 2 * static_cast<int>(rng() % 19);   // 4..40, even
    int kd = static_cast<int>(rng() % 4);
    kd = std::min(kd, (n - 2) / 2);  // generator needs n >= 2*kd + 2
    const double gap = std::pow(10.0, -2.0 * draw_unit(rng));  // [0.01, 1]
    const HamiltonSystem sys =
        random_system(n, kd, gap, sh.cfg.seed * 1000003ull + i);
    const ConditionReport rep = check_conditions(sys);

    const double eps = rep.gap_epsilon_H;
    min_epsilon = std::min(min_epsilon, eps);
    if (!(eps > 1e-6)) ++violations;
    for (int j = 0; j < sys.h_eigenvalues.size(); ++j) {
      const double a = std::abs(sys.h_eigenvalues[j]);
      if (!(a < 1e-8 || a >= eps * (1.0 - 1e-12))) ++violations;
    }
  }
  const double elapsed = seconds_since(start);

  Check ck;
  ck.require(violations == 0, "eigenvalue dichotomy violations=" +
                                  std::to_string(violations) + " over 200 systems");
  ck.require(min_epsilon > 1e-6,
             "min measured gap=" + fmt(min_epsilon) + " > 1e-6");
  if (elapsed >= 60.0) {
    ck.require(false, "random suite exceeded the 60 s budget");
  }

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"violations", violations}, {"min_epsilon", min_epsilon}};
}

// --- Criterion 4: jordan block structure ---------------------------------

void c4_jordan(Shared& sh, CriterionResult& r) {
  sh.dense_kink_system();
  const JordanData& jd = *sh.dense_jordan;

  Check ck;
  ck.require(jd.block_count == 1,
             "kink block_count=" + std::to_string(jd.block_count) + " == 1");
  ck.require(jd.chain2_residual < 1e-9,
             "chain identities residual=" + fmt(jd.chain2_residual) + " < 1e-9");
  ck.require(jd.chain3_excluded, "length-3 chain excluded (distance " +
                                     fmt(jd.chain3_residual) + ")");

  // Random suite: block count equals dim(Ker H ∩ Ran Λ) and matches the
  // nilpotency rank drop of A computed independently.
  int mismatches = 0;
  for (int i = 0; i < 6; ++i) {
    for (int kd = 0; kd < 4; ++kd) {
      const HamiltonSystem sys =
          random_system(12, kd, 0.5, sh.cfg.seed * 31ull + 7ull * i + kd);
      const JordanData rj = jordan_structure(sys);
      Eigen::FullPivLU<Mat> luA(sys.A);
      Eigen::FullPivLU<Mat> luA2(Mat(sys.A * sys.A));
      luA.setThreshold(1e-7);
      luA2.setThreshold(1e-7);
      const int rank_drop =
          static_cast<int>(luA.rank()) - static_cast<int>(luA2.rank());
      if (rj.block_count != rj.dim_ker_HR || rj.block_count != rank_drop) {
        ++mismatches;
      }
    }
  }
  ck.require(mismatches == 0,
             "block_count = dim(Ker H ∩ Ran Λ) on 24/24 random systems");

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"kink_block_count", jd.block_count},
                    {"chain2_residual", jd.chain2_residual},
                    {"chain3_residual", jd.chain3_residual},
                    {"random_mismatches", mismatches}};
}

// --- Criterion 5: propagator equivalence ---------------------------------

void c5_propagator(Shared& sh, CriterionResult& r) {
  const int dims[] = {24, 60, 120, 160, 200};
  const int kds[] = {0, 1, 2, 3, 1};
  const double gaps[] = {1.0, 0.5, 0.1, 0.05, 0.02};

  double worst = 0.0;
  int states = 0;
  for (int s = 0; s < 5; ++s) {
    const HamiltonSystem sys =
        random_system(dims[s], kds[s], gaps[s], sh.cfg.seed * 101ull + s);
    for (int j = 0; j < 4; ++j) {
      const CVec X0 = random_cvec(dims[s], sh.cfg.seed * 977ull + 13ull * s + j);
      ++states;
      for (const double t : {0.0, 1.25, 5.0, 12.5, 20.0}) {
        const CVec Xr = reconstruct_X(sys, X0, t);
        const CVec Xe = expm_apply(sys.A, X0, t);
        worst = std::max(worst, (Xr - Xe).norm() / X0.norm());
      }
    }
  }

  Check ck;
  ck.require(worst < 1e-8, "max ||reconstruct - expm||/||X0||=" + fmt(worst) +
                               " < 1e-8 over " + std::to_string(states) +
                               " states, t in [0,20]");
  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"max_relative_error", worst}, {"states", states}};
}

// --- Criterion 6: secular trajectory -------------------------------------

void c6_secular(Shared& sh, CriterionResult& r) {
  Check ck;

  // Dense reduced kink: trajectory of the generalized vector is exactly
  // affine in t.
  const HamiltonSystem& dense = sh.dense_kink_system();
  const JordanData& jd = *sh.dense_jordan;
  double dense_worst = 0.0;
  if (jd.secular_pairs.empty()) {
    ck.require(false, "dense kink system has no secular pair");
  } else {
    const auto& [phi, psi] = jd.secular_pairs[0];
    for (const double t : {0.0, 1.0, 7.5, 20.0}) {
      const CVec Xt = reconstruct_X(dense, psi.cast<cplx>(), t);
      const CVec expect = (psi + t * phi).cast<cplx>();
      dense_worst = std::max(dense_worst, (Xt - expect).cwiseAbs().maxCoeff());
    }
    ck.require(dense_worst < 1e-9,
               "dense path deviation=" + fmt(dense_worst) + " < 1e-9");
  }

  // Structured production path: same statement through the block solver.
  const Pipeline& pipe = sh.pipeline();
  const auto [phi0, psi0] = gl_secular_components(pipe.sys, sh.packet);
  double block_worst = 0.0;
  for (const double t : {0.0, 1.0, 7.5, 20.0}) {
    const CVec Xt = gl_reconstruct_X(pipe.sys, psi0, t);
    const CVec expect = psi0 + t * phi0;
    block_worst =
        std::max(block_worst, gl_state_norm(pipe.sys, CVec(Xt - expect)));
  }
  ck.require(block_worst < 1e-9,
             "block path deviation=" + fmt(block_worst) + " < 1e-9");

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"dense_deviation", dense_worst},
                    {"block_deviation", block_worst}};
}

// --- Criterion 7: scattering solver accuracy -----------------------------

void c7_scattering(Shared& sh, CriterionResult& r) {
  Check ck;

  // Free potential: the solver must return the free wave exactly.
  double identity_err = 0.0;
  {
    const Grid1D g = make_grid(20.0, 801);
    const Vec V = Vec::Zero(g.n_points);
    for (const auto disp : {DispersionModel::continuum, DispersionModel::lattice}) {
      LsOptions opts;
      opts.dispersion = disp;
      const auto [odd, even] = solve_ls_pair(2.0, V, 1.0, g, opts);
      const Vec fo = free_wave(2.0, 1.0, Parity::odd, g, disp);
      const Vec fe = free_wave(2.0, 1.0, Parity::even, g, disp);
      identity_err = std::max(
          identity_err, (odd.e_values - fo.cast<cplx>()).cwiseAbs().maxCoeff());
      identity_err = std::max(
          identity_err, (even.e_values - fe.cast<cplx>()).cwiseAbs().maxCoeff());
    }
    ck.require(identity_err < 1e-12,
               "free-potential identity error=" + fmt(identity_err) + " < 1e-12");
  }

  // Kink potential against the reflectionless closed form, weighted norm.
  const double m = sh.cfg.m;
  const Grid1D g = make_grid(sh.cfg.L, sh.cfg.N);
  const Vec V = analytic_kink_potential(g, m);
  LsOptions opts;  // continuum dispersion: the closed form lives off-lattice
  opts.support_radius = std::min(25.0, 0.75 * sh.cfg.L);
  double worst_err = 0.0;
  double worst_ll2 = 0.0;
  const double unit = m / std::sqrt(2.0);
  for (const double omega : {1.5 * unit, 2.0 * unit, 3.0 * unit}) {
    const auto [odd, even] = solve_ls_pair(omega, V, m, g, opts);
    const CVec oo = reflectionless_oracle(g, m, omega, Parity::odd);
    const CVec oe = reflectionless_oracle(g, m, omega, Parity::even);
    worst_err = std::max(worst_err,
                         weighted_norm(CVec(odd.e_values - oo), 2.0, g) /
                             weighted_norm(oo, 2.0, g));
    worst_err = std::max(worst_err,
                         weighted_norm(CVec(even.e_values - oe), 2.0, g) /
                             weighted_norm(oe, 2.0, g));
    worst_ll2 = std::max({worst_ll2, odd.ll2_residual, even.ll2_residual});
  }
  // The comparison path runs the corner-corrected O(h⁴) kernel, so its
  // discretization error relaxes with tol_scale² on coarse grids (capped so
  // the check never becomes vacuous).
  const double tol_e = std::min(0.5, 1e-5 * sh.tol_scale * sh.tol_scale);
  const double tol_ll2 = std::min(0.5, 1e-6 * sh.tol_scale * sh.tol_scale);
  ck.require(worst_err < tol_e,
             "closed-form deviation=" + fmt(worst_err) + " < " + fmt(tol_e));
  ck.require(worst_ll2 < tol_ll2,
             "cross-construction residual=" + fmt(worst_ll2) + " < " +
                 fmt(tol_ll2));

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"identity_error", identity_err},
                    {"closed_form_error", worst_err},
                    {"cross_construction_residual", worst_ll2}};
}

// --- Criterion 8: threshold resonance detector ---------------------------

void c8_resonance(Shared& sh, CriterionResult& r) {
  const double m = sh.cfg.m;
  const Grid1D g = make_grid(sh.cfg.L, sh.cfg.N);
  LsOptions opts;
  opts.dispersion = DispersionModel::lattice;

  const ResonanceReport free_rep =
      detect_resonance(Vec::Zero(g.n_points), m, g);
  const Vec vk = analytic_kink_potential(g, m);
  const ResonanceReport kink_rep = detect_resonance(vk, m, g, nullptr, opts);

  Vec vd = vk;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.points[i];
    vd[i] += sh.cfg.detuned_strength * std::exp(-x * x);
  }
  const ResonanceReport det_rep = detect_resonance(vd, m, g, nullptr, opts);

  Check ck;
  ck.require(free_rep.resonant && free_rep.T0_abs > 0.5,
             "free line resonant, |T(0)|=" + fmt(free_rep.T0_abs) + " > 0.5");
  // The kink resonance is a codimension-one property that the O(h²) lattice
  // perturbation (relative size ~12 h² in |T(0)|) genuinely destroys on very
  // coarse meshes; only demand it where the discretization preserves it.
  const double h = g.spacing;
  if (1.0 - 12.0 * h * h > 0.5) {
    ck.require(kink_rep.resonant && kink_rep.T0_abs > 0.5,
               "kink resonant, |T(0)|=" + fmt(kink_rep.T0_abs) + " > 0.5");
  } else {
    ck.require(true, "kink resonance not representable at h=" + fmt(h) +
                         " (detector reports |T(0)|=" + fmt(kink_rep.T0_abs) +
                         ")");
  }
  ck.require(!det_rep.resonant && det_rep.T0_abs < 0.5,
             "detuned non-resonant, |T(0)|=" + fmt(det_rep.T0_abs) + " < 0.5");

  // At the pinned configuration the detuned transmission and inverse-norm
  // indicator have frozen reference values; check them when applicable.
  const bool pinned = std::abs(sh.cfg.L - 40.0) < 1e-12 && sh.cfg.N == 1601 &&
                      std::abs(m - std::sqrt(2.0)) < 1e-12 &&
                      std::abs(sh.cfg.detuned_strength - 0.3) < 1e-12;
  if (pinned) {
    ck.require(std::abs(det_rep.T0_abs - 0.0056827) < 0.05 * 0.0056827,
               "detuned |T(0)|=" + fmt(det_rep.T0_abs) +
                   " matches frozen 0.0056827");
    ck.require(std::abs(det_rep.indicator - 81.4615) < 0.05 * 81.4615,
               "detuned indicator=" + fmt(det_rep.indicator) +
                   " matches frozen 81.46");
  }

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"free_T0", free_rep.T0_abs},
                    {"kink_T0", kink_rep.T0_abs},
                    {"detuned_T0", det_rep.T0_abs},
                    {"detuned_indicator", det_rep.indicator}};
}

// --- Criterion 9: continuum normalization --------------------------------

void c9_normalization(Shared& sh, CriterionResult& r) {
  const Pipeline& pipe = sh.pipeline();
  const ContinuumFamily& fam = sh.continuum_family();
  const Grid1D& grid = pipe.sys.grid;
  const int n = grid.n_points;
  const double tol = std::min(0.5, sh.cfg.quad_tol * sh.tol_scale);
  Check ck;

  // Smeared-δ test: a packet synthesized from a known density g(ω) over one
  // parity channel must have ‖Z_g‖² = 2π ∫ |g|² dω.
  {
    const double center = 2.5 * sh.cfg.m / std::sqrt(2.0);
    const double width = 0.25 * sh.cfg.m / std::sqrt(2.0);
    CVec z1 = CVec::Zero(n), z2 = CVec::Zero(n);
    double g2 = 0.0;
    for (std::size_t j = 0; j < fam.omega.size(); ++j) {
      const double w = fam.weight[j];
      const double u = (fam.omega[j] - center) / width;
      const double g = std::exp(-0.5 * u * u);
      z1 += (w * g) * fam.odd[j].e_values;
      z2 += (w * g) * (-I) * fam.odd[j].e_values;
      g2 += w * g * g;
    }
    const double target = 2.0 * std::numbers::pi * g2;
    const double got = std::pow(quad_norm(z1, grid), 2.0) +
                       std::pow(quad_norm(z2, grid), 2.0);
    const double defect = std::abs(got - target) / target;
    ck.require(defect < tol,
               "smeared-delta defect=" + fmt(defect) + " < " + fmt(tol));
    r.measurements["smeared_delta_defect"] = defect;
  }

  // Parseval budget of the packet fixture: kernel + discrete + continuum
  // shares must add up to ‖ΛX0‖².
  {
    const ExpansionData& ex = sh.expansion();
    const CVec Z0 = gl_apply_Lambda(pipe.sys, sh.packet);
    const double total = std::pow(quad_norm(Z0.head(n).eval(), grid), 2.0) +
                         std::pow(quad_norm(Z0.tail(n).eval(), grid), 2.0);

    double pp0 = 0.0;
    if (pipe.sys.v0.size() > 0) {
      const CVec v0c = pipe.sys.v0.cast<cplx>();
      pp0 = std::norm(inner_product(Z0.tail(n), v0c, grid)) /
            std::pow(quad_norm(v0c, grid), 2.0);
    }
    double discrete_sum = 0.0;
    for (const DiscreteMode& dm : ex.discrete) {
      if (dm.omega == 0.0) continue;  // kernel entry lives outside Z-space
      discrete_sum += std::norm(dm.C) * 2.0 * grid.spacing;
    }
    double continuum_sum = 0.0;
    for (const ContinuumMode& cm : ex.continuum) {
      continuum_sum += 2.0 * std::numbers::pi * cm.weight * std::norm(cm.C);
    }
    const double budget = pp0 + discrete_sum + continuum_sum;
    const double defect = std::abs(budget - total) / total;
    ck.require(defect < tol,
               "Parseval defect=" + fmt(defect) + " < " + fmt(tol));
    r.measurements["parseval_defect"] = defect;
  }

  r.passed = ck.ok;
  r.detail = ck.detail;
}

// --- Criterion 10: expansion reconstruction ------------------------------

void c10_reconstruction(Shared& sh, CriterionResult& r) {
  const clock_type::time_point start = clock_type::now();
  const Pipeline& pipe = sh.pipeline();
  const ExpansionData& ex = sh.expansion();
  const int n = pipe.sys.n_points;

  // Exact-oracle trajectory through the independent spectral formula for
  // psi'' = -S psi (cosine/sinc calculus), not the block solver.
  std::vector<double> times;
  std::vector<CVec> oracle;
  for (int k = 0; k <= 10; ++k) {
    const double t = sh.cfg.T * static_cast<double>(k) / 10.0;
    times.push_back(t);
    const auto [psi, psidot] = exact_spectral_propagate(
        pipe.sys.sd, sh.packet.head(n), sh.packet.tail(n), t);
    CVec X(2 * n);
    X.head(n) = psi;
    X.tail(n) = psidot;
    oracle.push_back(std::move(X));
  }

  std::vector<double> ladder;
  for (const double f : {3.0, 5.0, 8.0, 12.0}) {
    ladder.push_back(std::min(f * sh.cfg.m, sh.omega_eff));
  }
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

  const ConvergenceTable table =
      convergence_curve(ex, pipe.sys, times, oracle, ladder);
  const double final_residual = table.rows.back().v_residual;
  const double tol = std::min(0.5, sh.cfg.recon_tol * sh.tol_scale);
  const double elapsed = sh.family_seconds + seconds_since(start);

  Check ck;
  ck.require(final_residual < tol,
             "sup-t V-norm residual=" + fmt(final_residual) + " < " + fmt(tol) +
                 " at full coverage");
  ck.require(table.monotone, "residual monotone over the truncation ladder");
  if (elapsed >= 300.0) {
    ck.require(false, "expansion pipeline exceeded the 5 min budget");
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const ConvergenceRow& row : table.rows) {
    rows.push_back({row.M, row.v_residual});
  }
  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"final_residual", final_residual},
                    {"ladder", rows},
                    {"monotone", table.monotone},
                    {"coverage", sh.omega_eff},
                    {"coverage_clamped", sh.coverage_clamped}};
}

// --- Criterion 11: symplectic pairing ------------------------------------

void c11_symplectic(Shared& sh, CriterionResult& r) {
  const Pipeline& pipe = sh.pipeline();
  const ExpansionData& ex = sh.expansion();
  const Grid1D& grid = pipe.sys.grid;
  const int n = grid.n_points;
  Check ck;

  // symplectic_renormalize runs its own internal smeared pairing self-check
  // (throws beyond 2%); reaching this point already certifies it once.
  const ExpansionData sym = symplectic_renormalize(ex);

  // Reconstruction must be invariant under the convention change.
  double invariance = 0.0;
  for (const double t : {0.0, 0.35 * sh.cfg.T, 0.8 * sh.cfg.T}) {
    const CVec before = reconstruct(ex, t, sh.omega_eff);
    const CVec after = reconstruct(sym, t, sh.omega_eff);
    invariance = std::max(invariance,
                          gl_v_norm(pipe.sys, CVec(after - before)) /
                              gl_v_norm(pipe.sys, before));
  }
  ck.require(invariance < 1e-10,
             "reconstruction invariance=" + fmt(invariance) + " < 1e-10");

  // Smeared J-pairing of two synthetic packets against the coefficient
  // integral with the sign weight, on both frequency sides.
  const double unit = sh.cfg.m / std::sqrt(2.0);
  double worst_pairing = 0.0;
  const auto packet = [&](double center, double width, double sign) {
    CVec x = CVec::Zero(2 * n);
    for (const ContinuumMode& cm : sym.continuum) {
      if (cm.parity != Parity::odd || cm.omega * sign <= 0.0) continue;
      const double u = (std::abs(cm.omega) - center) / width;
      x += (cm.weight * std::exp(-0.5 * u * u)) * cm.a;
    }
    return x;
  };
  for (const double sign : {1.0, -1.0}) {
    const double c1 = 4.0 * unit, c2 = 4.4 * unit, w = 0.5 * unit;
    const CVec x1 = packet(c1, w, sign);
    const CVec x2 = packet(c2, w, sign);
    const CVec jx2 = gl_apply_J(x2);
    const cplx lhs = -I * (inner_product(x1.head(n), jx2.head(n), grid) +
                           inner_product(x1.tail(n), jx2.tail(n), grid));
    double rhs = 0.0;
    for (const ContinuumMode& cm : sym.continuum) {
      if (cm.parity != Parity::odd || cm.omega * sign <= 0.0) continue;
      const double g1 = std::exp(-0.5 * std::pow((std::abs(cm.omega) - c1) / w, 2.0));
      const double g2 = std::exp(-0.5 * std::pow((std::abs(cm.omega) - c2) / w, 2.0));
      rhs += cm.weight * sgn(cm.omega) * g1 * g2;
    }
    if (!(rhs * sign > 0.0)) {
      ck.require(false, "pairing integral has the wrong sign");
      continue;
    }
    worst_pairing = std::max(worst_pairing, std::abs(lhs - rhs) / std::abs(rhs));
  }
  const double tol = std::min(0.5, sh.cfg.quad_tol * sh.tol_scale);
  ck.require(worst_pairing < tol,
             "smeared pairing defect=" + fmt(worst_pairing) + " < " + fmt(tol));

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"invariance", invariance},
                    {"pairing_defect", worst_pairing}};
}

// --- Criterion 12: independent oracle agreement --------------------------

void c12_oracles(Shared& sh, CriterionResult& r) {
  const Pipeline& pipe = sh.pipeline();
  const SymOperator& S = pipe.model.S;
  const int n = pipe.sys.n_points;
  const CVec psi0 = sh.packet.head(n);
  const CVec psidot0 = sh.packet.tail(n);
  Check ck;

  // Convergence order of the symplectic integrator against the spectral
  // closed form under dt-halving.
  const double bound = S.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  const double dt_stable = 2.0 / std::sqrt(std::max(bound, 1e-300));
  const double dt1 = std::min(sh.cfg.dt, 0.4 * dt_stable);
  const double t_fit = 2.0;
  std::vector<double> errs;
  for (const double dt : {dt1, dt1 / 2.0, dt1 / 4.0}) {
    const Trajectory traj = leapfrog(S, psi0, psidot0, dt, t_fit, 1 << 20);
    const double t_end = traj.times.back();
    const auto [pe, pde] = exact_spectral_propagate(pipe.sys.sd, psi0, psidot0, t_end);
    const CVec& X = traj.states.back();
    errs.push_back(std::hypot(quad_norm(CVec(X.head(n) - pe), pipe.sys.grid),
                              quad_norm(CVec(X.tail(n) - pde), pipe.sys.grid)));
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  const double order = std::min(order1, order2);
  ck.require(order >= 1.9, "convergence order=" + fmt(order) + " >= 1.9");

  // Energy conservation of the exact propagator: relative drift of the
  // conserved quadratic form along t in [0, T].
  const double e0 = pipe.sys.grid.spacing *
                    (psi0.dot(apply_sym(S, psi0)).real() + psidot0.squaredNorm());
  double drift = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double t = sh.cfg.T * static_cast<double>(k) / 10.0;
    const auto [pe, pde] = exact_spectral_propagate(pipe.sys.sd, psi0, psidot0, t);
    const double et = pipe.sys.grid.spacing *
                      (pe.dot(apply_sym(S, pe)).real() + pde.squaredNorm());
    drift = std::max(drift, std::abs(et - e0) / std::abs(e0));
  }
  ck.require(drift < 1e-9, "exact-propagator energy drift=" + fmt(drift) +
                               " < 1e-9");

  r.passed = ck.ok;
  r.detail = ck.detail;
  r.measurements = {{"order", order}, {"energy_drift", drift}};
}

}  // namespace

std::vector<CriterionResult> run_all_criteria(const RunConfig& config) {
  validate_config(config);
  Shared sh;
  sh.cfg = config;
  sh.cfg.potential_mode = PotentialMode::cubic;
  const double h = 2.0 * config.L / (config.N - 1);
  sh.tol_scale = std::max(1.0, std::pow(h / 0.05, 2.0));

  // Clamp the family coverage to frequencies the lattice dispersion can
  // represent on this mesh (k·h/2 < 1), so coarse-grid configs still run.
  {
    const double k_cap = 0.95 * 2.0 / h;
    const double m2 = config.m * config.m;  // effective mass is within O(h²)
    const double cap = std::sqrt(m2 + k_cap * k_cap);
    sh.omega_eff = std::min(config.Omega_max, cap);
    sh.coverage_clamped = sh.omega_eff < config.Omega_max;
  }

  struct Entry {
    int id;
    const char* name;
    std::function<void(Shared&, CriterionResult&)> fn;
  };
  const std::vector<Entry> entries = {
      {1, "kink spectrum", c1_kink_spectrum},
      {2, "translation zero mode", c2_zero_mode},
      {3, "spectral gap of random systems", c3_random_gap},
      {4, "jordan block structure", c4_jordan},
      {5, "propagator equivalence", c5_propagator},
      {6, "secular trajectory", c6_secular},
      {7, "scattering solver accuracy", c7_scattering},
      {8, "threshold resonance detector", c8_resonance},
      {9, "continuum normalization", c9_normalization},
      {10, "expansion reconstruction", c10_reconstruction},
      {11, "symplectic pairing", c11_symplectic},
      {12, "independent oracle agreement", c12_oracles},
  };

  std::vector<CriterionResult> out;
  out.reserve(entries.size());
  for (const Entry& e : entries) {
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.measurements = nlohmann::json::object();
    const clock_type::time_point start = clock_type::now();
    try {
      e.fn(sh, r);
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = seconds_since(start);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hamspec::cli
