#pragma once
// Command implementations behind the CLI: each returns a process exit code
// (0 success, 1 criterion/condition failure, 2 usage or input error) and
// writes its machine-readable outputs under config.output_dir.

#include <string>

#include "config.hpp"
#include "hamspec/gl_system.hpp"
#include "hamspec/grid.hpp"
#include "hamspec/linop.hpp"
#include "hamspec/types.hpp"

namespace hamspec::cli {

/// Scattering data assembled from a config, before any eigensolve: grid,
/// decaying potential for the selected mode, effective mass (continuum edge
/// = mass²), and the discretized operator S.
struct ScatteringModel {
  Grid1D grid;
  Vec potential;
  double mass = 0.0;
  SymOperator S;
};

ScatteringModel build_scattering_model(const RunConfig& config);

/// ScatteringModel plus the full spectral skeleton (eigendecomposition).
struct Pipeline {
  ScatteringModel model;
  GlBlockSystem sys;
};

Pipeline build_pipeline(const RunConfig& config);

/// The standard localized wave packet used as default initial data:
/// ψ = exp(−(x−1)²/(2·0.35²)), π = 0.5·exp(−(x−0.8)²/(2·0.45²)).
CVec gaussian_packet(const Grid1D& grid);

int cmd_check(const RunConfig& config);
int cmd_spectrum(const RunConfig& config);
int cmd_kink(const RunConfig& config);
int cmd_eigenfunction(const RunConfig& config, double omega,
                      const std::string& parity);
int cmd_expand(const RunConfig& config, const std::string& initial_path);
int cmd_propagate(const RunConfig& config, double t,
                  const std::string& initial_path);
int cmd_validate(const RunConfig& config);

}  // namespace hamspec::cli
