// Command-line driver. Global options pick the configuration; every
// subcommand writes machine-readable artifacts under the output directory.
// Exit codes: 0 success, 1 criterion/condition failure, 2 usage or config
// error.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  using namespace hamspec::cli;

  CLI::App app{
      "Spectral toolkit for the linearized kink dynamics of the scalar field "
      "model: spectra, scattering eigenfunctions, eigenfunction expansions, "
      "propagation, and the acceptance validation suite."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path,
                 "configuration file (section.key = value lines)");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "random seed (overrides config seed)");

  CLI::App* c_check = app.add_subcommand(
      "check", "verify the structural conditions of the assembled system");
  CLI::App* c_spectrum = app.add_subcommand(
      "spectrum", "export the spectra of S and of the block generator");
  CLI::App* c_kink = app.add_subcommand(
      "kink", "export the kink profile, zero mode, and adapted potential");

  double omega = 0.0;
  std::string parity;
  CLI::App* c_eig = app.add_subcommand(
      "eigenfunction", "solve one continuum eigenfunction at frequency omega");
  c_eig->add_option("--omega", omega, "frequency (|omega| beyond the edge)")
      ->required();
  c_eig->add_option("--parity", parity, "channel: odd or even")->required();

  std::string expand_initial;
  CLI::App* c_expand = app.add_subcommand(
      "expand", "decompose an initial state into the eigenfunction expansion");
  c_expand->add_option("--initial", expand_initial,
                       "initial-state CSV (default: built-in wave packet)");

  double t = 0.0;
  std::string prop_initial;
  CLI::App* c_prop = app.add_subcommand(
      "propagate", "evaluate the solution map at time t");
  CLI::Option* t_opt =
      c_prop->add_option("--t", t, "target time (default: time.T)");
  c_prop->add_option("--initial", prop_initial,
                     "initial-state CSV (default: built-in wave packet)");

  CLI::App* c_validate = app.add_subcommand(
      "validate", "run the full acceptance criteria suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits 0; any parse problem is usage error
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      config = parse_config_file(config_path);
    }
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed_opt->count() > 0) config.seed = seed;
    validate_config(config);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  if (c_check->parsed()) return cmd_check(config);
  if (c_spectrum->parsed()) return cmd_spectrum(config);
  if (c_kink->parsed()) return cmd_kink(config);
  if (c_eig->parsed()) return cmd_eigenfunction(config, omega, parity);
  if (c_expand->parsed()) return cmd_expand(config, expand_initial);
  if (c_prop->parsed()) {
    return cmd_propagate(config, t_opt->count() > 0 ? t : config.T,
                         prop_initial);
  }
  if (c_validate->parsed()) return cmd_validate(config);
  return 2;
}
