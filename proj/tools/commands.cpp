#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "criteria.hpp"
#include "hamspec/continuum.hpp"
#include "hamspec/expansion.hpp"
#include "hamspec/model_gl.hpp"
#include "hamspec/validate.hpp"

namespace hamspec::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// 17 significant digits: enough to round-trip an IEEE double exactly, and
/// byte-stable across runs for deterministic outputs.
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

fs::path out_path(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.output_dir);
  return fs::path(config.output_dir) / name;
}

std::ofstream open_out(const RunConfig& config, const std::string& name) {
  const fs::path path = out_path(config, name);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

void write_json(const RunConfig& config, const std::string& name, const json& j) {
  std::ofstream out = open_out(config, name);
  out << j.dump(2) << "\n";
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& field, double& value) {
  try {
    std::size_t pos = 0;
    value = std::stod(field, &pos);
    return pos == field.size();
  } catch (const std::exception&) {
    return false;
  }
}

/// Reads an initial state from CSV. Accepted layouts (after an optional
/// header row and `#` comments):
///   x,psi,psidot                      (real data)
///   x,re_psi,im_psi,re_pi,im_pi      (complex data, as written by propagate)
/// Samples must have strictly increasing x; the state is interpolated
/// linearly onto the run grid and set to zero outside the sampled range.
CVec read_initial_state(const std::string& path, const Grid1D& grid) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open initial-state file: " + path);
  }
  std::vector<double> xs;
  std::vector<cplx> psis, pis;
  std::string line;
  int lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));

    std::vector<double> vals(fields.size());
    bool numeric = !fields.empty();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], vals[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (header_allowed) {  // one header row is fine
        header_allowed = false;
        continue;
      }
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": non-numeric data row");
    }
    header_allowed = false;
    if (fields.size() != 3 && fields.size() != 5) {
      throw std::runtime_error(
          path + ":" + std::to_string(lineno) +
          ": expected 3 columns (x,psi,psidot) or 5 columns "
          "(x,re_psi,im_psi,re_pi,im_pi), got " +
          std::to_string(fields.size()));
    }
    if (!xs.empty() && vals[0] <= xs.back()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": x samples must be strictly increasing");
    }
    xs.push_back(vals[0]);
    if (fields.size() == 3) {
      psis.push_back(cplx(vals[1], 0.0));
      pis.push_back(cplx(vals[2], 0.0));
    } else {
      psis.push_back(cplx(vals[1], vals[2]));
      pis.push_back(cplx(vals[3], vals[4]));
    }
  }
  if (xs.size() < 2) {
    throw std::runtime_error(path + ": needs at least two data rows");
  }

  const int n = grid.n_points;
  CVec X = CVec::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    double x = grid.points[i];
    if (x < xs.front() - 1e-12 || x > xs.back() + 1e-12) continue;
    x = std::clamp(x, xs.front(), xs.back());
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = std::min<std::size_t>(
        xs.size() - 1, std::max<std::ptrdiff_t>(1, it - xs.begin()));
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    X[i] = (1.0 - w) * psis[lo] + w * psis[hi];
    X[n + i] = (1.0 - w) * pis[lo] + w * pis[hi];
  }
  return X;
}

/// Uniform double in [0, 1) from the top 53 bits of a raw mt19937_64 draw;
/// bit-identical across platforms, unlike std::uniform_real_distribution.
double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// ⟨u, v⟩ on a plain 2N block vector (Euclidean, conjugate-linear in v).
cplx pair2(const CVec& u, const CVec& v) { return v.dot(u); }

/// Scattering options shared by the expansion-facing commands: exact lattice
/// dispersion so the family members are genuine grid eigenvectors, a support
/// radius that comfortably covers the decaying potentials in play, and no
/// per-node cross-check (the family is large; consistency is covered by the
/// unit suites).
LsOptions family_options(const RunConfig& config) {
  LsOptions opts;
  opts.dispersion = DispersionModel::lattice;
  opts.support_radius = 10.0;
  opts.cross_check = false;
  opts.margin = config.omega_margin;
  return opts;
}

/// Truncation ladder for convergence tables: multiples {3, 5, 8}·m below the
/// coverage, then the full coverage itself.
std::vector<double> truncation_ladder(double m, double omega_max) {
  std::vector<double> out;
  for (const double f : {3.0, 5.0, 8.0}) {
    if (f * m < omega_max - 1e-9) out.push_back(f * m);
  }
  out.push_back(omega_max);
  return out;
}

/// Uniform-weight energy h·(ψᴴSψ + ‖π‖²) — the quadratic form the discrete
/// flow conserves exactly (see validate.hpp for why the trapezoid variant
/// drifts at the walls).
double block_energy(const GlBlockSystem& sys, const CVec& X) {
  const int n = sys.n_points;
  const CVec psi = X.head(n);
  const CVec pi = X.tail(n);
  const CVec spsi = apply_sym(sys.S, psi);
  return sys.grid.spacing * (psi.dot(spsi).real() + pi.squaredNorm());
}

double gershgorin_bound(const SymOperator& S) {
  return S.matrix.cwiseAbs().rowwise().sum().maxCoeff();
}

int usage_error(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 2;
}

}  // namespace

ScatteringModel build_scattering_model(const RunConfig& config) {
  validate_config(config);
  ScatteringModel model;
  model.grid = make_grid(config.L, config.N);
  switch (config.potential_mode) {
    case PotentialMode::free_line:
      model.potential = Vec::Zero(config.N);
      model.mass = config.m;
      break;
    case PotentialMode::cubic:
    case PotentialMode::detuned: {
      const KinkProfile kink =
          kink_profile(model.grid, GLModel{config.a, config.m});
      const AdaptedPotential ap = grid_adapted_potential(kink);
      model.potential = ap.values;
      model.mass = ap.effective_mass;
      if (config.potential_mode == PotentialMode::detuned) {
        for (int i = 0; i < config.N; ++i) {
          const double x = model.grid.points[i];
          model.potential[i] += config.detuned_strength * std::exp(-x * x);
        }
      }
      break;
    }
  }
  model.S = assemble_S(model.grid, model.mass, model.potential);
  return model;
}

Pipeline build_pipeline(const RunConfig& config) {
  Pipeline pipe;
  pipe.model = build_scattering_model(config);
  pipe.sys = make_gl_block_system(pipe.model.S, pipe.model.mass,
                                  config.kernel_tol);
  return pipe;
}

CVec gaussian_packet(const Grid1D& grid) {
  const int n = grid.n_points;
  CVec X(2 * n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.points[i];
    X[i] = std::exp(-std::pow(x - 1.0, 2.0) / (2.0 * 0.35 * 0.35));
    X[n + i] = 0.5 * std::exp(-std::pow(x - 0.8, 2.0) / (2.0 * 0.45 * 0.45));
  }
  return X;
}

int cmd_check(const RunConfig& config) try {
  const Pipeline pipe = build_pipeline(config);
  const GlBlockSystem& sys = pipe.sys;
  const SpectralData& sd = sys.sd;
  const int n = sys.n_points;
  const double lam_max = std::max(sd.eigenvalues.maxCoeff(), 0.0);

  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  // Structural gap of B = blockdiag(S, I): the momentum block contributes
  // the eigenvalue 1, so the reported positivity gap is min(gap(S), 1).
  const double delta = std::min(sd.gap, 1.0);
  const double epsilon_H = std::sqrt(std::max(sd.gap, 0.0));
  if (!(delta > 0.0)) {
    violations.push_back("positivity gap of B is not positive");
  }

  // Hermiticity of H = Λ iJ Λ, probed without materializing the dense
  // operator: H(z₁, z₂) = i·(√S z₂, −√S z₁) through the spectral calculus.
  const auto apply_H = [&](const CVec& z) {
    const auto sqrt_clamped = [](double lam) {
      return std::sqrt(std::max(lam, 0.0));
    };
    CVec out(2 * n);
    out.head(n) = I * spectral_apply(sd, sqrt_clamped, CVec(z.tail(n)));
    out.tail(n) = -I * spectral_apply(sd, sqrt_clamped, CVec(z.head(n)));
    return out;
  };
  std::mt19937_64 rng(config.seed);
  const auto random_state = [&] {
    CVec z(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
      z[i] = cplx(2.0 * draw_unit(rng) - 1.0, 2.0 * draw_unit(rng) - 1.0);
    }
    return z;
  };
  double hermitian_residual = 0.0;
  for (int probe = 0; probe < 3; ++probe) {
    const CVec z1 = random_state();
    const CVec z2 = random_state();
    const cplx defect = pair2(apply_H(z1), z2) - pair2(z1, apply_H(z2));
    hermitian_residual =
        std::max(hermitian_residual,
                 std::abs(defect) / (std::sqrt(std::max(lam_max, 1.0)) *
                                     z1.norm() * z2.norm()));
  }
  if (hermitian_residual > 1e-10) {
    violations.push_back("H is not Hermitian within 1e-10 (residual " +
                         fmt17(hermitian_residual) + ")");
  }

  // Secular chain on a localized probe: A·Φ₀ = 0 and A·Ψ₀ = Φ₀ must hold to
  // rounding. With no kernel both components vanish and the residual is 0.
  double secular_residual = 0.0;
  {
    const auto [phi0, psi0] = gl_secular_components(sys, gaussian_packet(sys.grid));
    const double scale = 1.0 + std::sqrt(std::max(lam_max, 1.0));
    const double nphi = gl_state_norm(sys, phi0) + gl_state_norm(sys, psi0);
    if (nphi > 0.0) {
      const double r1 = gl_state_norm(sys, gl_apply_A(sys, phi0));
      const double r2 = gl_state_norm(sys, CVec(gl_apply_A(sys, psi0) - phi0));
      secular_residual = std::max(r1, r2) / (scale * nphi);
    }
  }
  if (secular_residual > 1e-9) {
    violations.push_back("secular chain residual above 1e-9 (" +
                         fmt17(secular_residual) + ")");
  }

  // Threshold-resonance detector at the continuum edge. A resonant edge is a
  // property of the model, not a defect: it only warns (the expansion layer
  // handles the k^{-1/2} density via the graded quadrature ladder).
  LsOptions ropts;
  ropts.dispersion = DispersionModel::lattice;
  const ResonanceReport rr =
      detect_resonance(pipe.model.potential, pipe.model.mass, sys.grid, &sd, ropts);
  if (rr.resonant) {
    warnings.push_back(
        "threshold resonance at the continuum edge (|T(0)| = " +
        fmt17(rr.T0_abs) + "): spectral density ~ k^(-1/2) near the edge");
  }

  json j;
  j["delta"] = delta;
  j["kernel_dim"] = sd.kernel_dim;
  j["epsilon_H"] = epsilon_H;
  j["H_hermitian_residual"] = hermitian_residual;
  j["secular_residual"] = secular_residual;
  j["sc11"] = {{"resonant", rr.resonant}, {"indicator", rr.indicator}};
  j["violations"] = violations;
  j["warnings"] = warnings;
  const std::string text = j.dump(2);
  std::printf("%s\n", text.c_str());
  write_json(config, "report.json", j);
  return violations.empty() ? 0 : 1;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

int cmd_spectrum(const RunConfig& config) try {
  const Pipeline pipe = build_pipeline(config);
  const SpectralData& sd = pipe.sys.sd;
  const double edge2 = pipe.model.mass * pipe.model.mass;

  {
    std::ofstream out = open_out(config, "spectrum_S.csv");
    out << "# edge_m2=" << fmt17(edge2) << "\n";
    out << "index,lambda,below_edge\n";
    for (int i = 0; i < sd.eigenvalues.size(); ++i) {
      const double lam = sd.eigenvalues[i];
      const bool below = lam < edge2 * (1.0 - 1e-3);
      out << i << "," << fmt17(lam) << "," << (below ? 1 : 0) << "\n";
    }
  }
  {
    // Frequencies of the block generator: ±√λ for every nonzero eigenvalue
    // of S plus a zero of multiplicity 2·dim Ker S. Exactly symmetric by
    // construction.
    std::vector<double> omegas;
    omegas.reserve(2 * sd.eigenvalues.size());
    for (int i = 0; i < sd.eigenvalues.size(); ++i) {
      if (i < sd.kernel_dim) {
        omegas.push_back(0.0);
        omegas.push_back(0.0);
      } else {
        const double w = std::sqrt(std::max(sd.eigenvalues[i], 0.0));
        omegas.push_back(-w);
        omegas.push_back(w);
      }
    }
    std::sort(omegas.begin(), omegas.end());
    std::ofstream out = open_out(config, "spectrum_H.csv");
    out << "# edge_m2=" << fmt17(edge2) << "\n";
    out << "index,omega\n";
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      out << i << "," << fmt17(omegas[i]) << "\n";
    }
  }
  return 0;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

int cmd_kink(const RunConfig& config) try {
  validate_config(config);
  const Grid1D grid = make_grid(config.L, config.N);
  const KinkProfile kink = kink_profile(grid, GLModel{config.a, config.m});
  const AdaptedPotential ap = grid_adapted_potential(kink);

  std::ofstream out = open_out(config, "kink.csv");
  out << "# a=" << fmt17(config.a) << " m=" << fmt17(config.m)
      << " effective_m=" << fmt17(ap.effective_mass)
      << " mass_shift=" << fmt17(ap.mass_shift)
      << " edge_m2=" << fmt17(ap.effective_mass * ap.effective_mass) << "\n";
  out << "x,s0,s0_prime,V_adapted\n";
  for (int i = 0; i < grid.n_points; ++i) {
    out << fmt17(grid.points[i]) << "," << fmt17(kink.values[i]) << ","
        << fmt17(kink.derivative[i]) << "," << fmt17(ap.values[i]) << "\n";
  }
  return 0;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

int cmd_eigenfunction(const RunConfig& config, double omega,
                      const std::string& parity) try {
  Parity par;
  if (parity == "odd") {
    par = Parity::odd;
  } else if (parity == "even") {
    par = Parity::even;
  } else {
    return usage_error("parity must be 'odd' or 'even', got '" + parity + "'");
  }
  const ScatteringModel model = build_scattering_model(config);
  if (!(std::abs(omega) > model.mass + config.omega_margin)) {
    return usage_error("omega = " + fmt17(omega) +
                       " is not beyond the continuum edge (need |omega| > " +
                       fmt17(model.mass + config.omega_margin) + ")");
  }

  LsOptions opts;
  opts.dispersion = DispersionModel::lattice;
  opts.margin = config.omega_margin;
  ContinuumEigenfunction efn = solve_lippmann_schwinger(
      omega, par, model.potential, model.mass, model.grid, opts);
  normalize_continuum(efn, model.grid);

  std::ofstream out = open_out(config, "eigenfunction.csv");
  out << "# omega=" << fmt17(omega) << " parity=" << parity
      << " wavenumber=" << fmt17(efn.wavenumber)
      << " lattice_wavenumber=" << fmt17(efn.lattice_wavenumber)
      << " norm_const=" << fmt17(efn.norm_const)
      << " ll2_residual=" << fmt17(efn.ll2_residual) << "\n";
  out << "x,re_e,im_e\n";
  for (int i = 0; i < model.grid.n_points; ++i) {
    out << fmt17(model.grid.points[i]) << "," << fmt17(efn.e_values[i].real())
        << "," << fmt17(efn.e_values[i].imag()) << "\n";
  }
  return 0;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

int cmd_expand(const RunConfig& config, const std::string& initial_path) try {
  const Pipeline pipe = build_pipeline(config);
  const GlBlockSystem& sys = pipe.sys;
  const CVec X0 = initial_path.empty()
                      ? gaussian_packet(sys.grid)
                      : read_initial_state(initial_path, sys.grid);

  // The lattice dispersion k ↦ (2/h)·asin(kh/2) only represents wavenumbers
  // with kh/2 < 1; reject coverages beyond that band up front.
  const double k_max = std::sqrt(std::max(
      config.Omega_max * config.Omega_max - pipe.model.mass * pipe.model.mass,
      0.0));
  if (k_max * sys.grid.spacing / 2.0 >= 1.0) {
    return usage_error(
        "spectral.Omega_max = " + fmt17(config.Omega_max) +
        " exceeds the representable band of this grid (need "
        "sqrt(Omega_max^2 - m^2)*h/2 < 1); reduce Omega_max or refine grid.N");
  }

  const ContinuumFamily family = build_family(
      pipe.model.potential, pipe.model.mass, sys.grid, config.Omega_max,
      config.omega_margin, family_options(config), config.panels);
  const ExpansionData ed = decompose(sys, X0, family, config.Omega_max);

  json j;
  j["phi0_norm"] = gl_state_norm(sys, ed.phi0);
  j["psi0_norm"] = gl_state_norm(sys, ed.psi0);
  {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(ed.discrete.size());
    for (const DiscreteMode& mode : ed.discrete) {
      rows.emplace_back(mode.omega, std::abs(mode.C));
    }
    std::sort(rows.begin(), rows.end());
    json arr = json::array();
    for (const auto& [w, c] : rows) arr.push_back({w, c});
    j["discrete"] = arr;
  }
  {
    json arr = json::array();
    for (const ContinuumMode& mode : ed.continuum) {
      arr.push_back({mode.omega, mode.C.real(), mode.C.imag()});
    }
    j["continuum"] = arr;
  }
  write_json(config, "expansion.json", j);

  // Truncation convergence against the closed-form solution map, sampled on
  // nine times across [0, T].
  std::vector<double> times;
  std::vector<CVec> oracle;
  for (int k = 0; k <= 8; ++k) {
    const double t = config.T * static_cast<double>(k) / 8.0;
    times.push_back(t);
    oracle.push_back(gl_reconstruct_X(sys, X0, t));
  }
  const std::vector<double> ladder =
      truncation_ladder(config.m, config.Omega_max);
  const ConvergenceTable table =
      convergence_curve(ed, sys, times, oracle, ladder);

  std::ofstream out = open_out(config, "convergence.csv");
  out << "# monotone=" << (table.monotone ? 1 : 0) << "\n";
  out << "M,v_residual,weighted_residual\n";
  for (const ConvergenceRow& row : table.rows) {
    out << fmt17(row.M) << "," << fmt17(row.v_residual) << ","
        << fmt17(row.weighted_residual) << "\n";
  }
  return 0;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

int cmd_propagate(const RunConfig& config, double t,
                  const std::string& initial_path) try {
  if (t < 0.0) {
    return usage_error("propagation time must be non-negative, got " + fmt17(t));
  }
  const Pipeline pipe = build_pipeline(config);
  const GlBlockSystem& sys = pipe.sys;
  const CVec X0 = initial_path.empty()
                      ? gaussian_packet(sys.grid)
                      : read_initial_state(initial_path, sys.grid);
  const CVec Xt = gl_reconstruct_X(sys, X0, t);

  const double e0 = block_energy(sys, X0);
  const double et = block_energy(sys, Xt);
  const double drift = std::abs(et - e0) / std::max(std::abs(e0), 1e-300);

  const int n = sys.n_points;
  std::ofstream out = open_out(config, "state.csv");
  out << "# t=" << fmt17(t) << " energy_initial=" << fmt17(e0)
      << " energy_final=" << fmt17(et) << " energy_rel_drift=" << fmt17(drift)
      << "\n";
  out << "x,re_psi,im_psi,re_pi,im_pi\n";
  for (int i = 0; i < n; ++i) {
    out << fmt17(sys.grid.points[i]) << "," << fmt17(Xt[i].real()) << ","
        << fmt17(Xt[i].imag()) << "," << fmt17(Xt[n + i].real()) << ","
        << fmt17(Xt[n + i].imag()) << "\n";
  }
  return 0;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

int cmd_validate(const RunConfig& config) try {
  // Reject an unstable time step before burning minutes of criteria work.
  // The Gershgorin row-sum bound needs no eigensolve and over-estimates
  // λ_max(S), so the check can only be conservative.
  {
    const ScatteringModel model = build_scattering_model(config);
    const double bound = gershgorin_bound(model.S);
    if (config.dt * std::sqrt(std::max(bound, 0.0)) >= 2.0) {
      return usage_error(
          "time.dt = " + fmt17(config.dt) +
          " is outside the leapfrog stability region "
          "(dt*sqrt(lambda_max) >= 2); reduce time.dt");
    }
  }

  const std::vector<CriterionResult> results = run_all_criteria(config);
  bool all_passed = true;
  json arr = json::array();
  for (const CriterionResult& r : results) {
    all_passed = all_passed && r.passed;
    std::printf("[%s] C%02d %s: %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str());
    json entry;
    entry["id"] = r.id;
    entry["name"] = r.name;
    entry["passed"] = r.passed;
    entry["detail"] = r.detail;
    entry["measurements"] = r.measurements;
    arr.push_back(entry);
  }
  json top;
  top["all_passed"] = all_passed;
  top["criteria"] = arr;
  write_json(config, "validation.json", top);
  std::printf("%s\n", all_passed ? "all criteria passed"
                                 : "one or more criteria FAILED");
  return all_passed ? 0 : 1;
} catch (const std::exception& e) {
  return usage_error(e.what());
}

}  // namespace hamspec::cli
