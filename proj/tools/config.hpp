#pragma once
// Run configuration for the command-line driver: a flat `section.key = value`
// text format chosen so fixtures diff cleanly. Parsing is strict — unknown
// keys, malformed numbers, and out-of-range values are reported with the
// offending line — and a parsed config serializes back to a canonical form
// that re-parses to the identical struct (round-trip invariant).

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hamspec::cli {

/// Scattering potential selected by `model.potential_mode`.
enum class PotentialMode {
  cubic,    ///< kink-adapted potential of the cubic field model
  detuned,  ///< cubic plus a Gaussian bump (strength model.detuned_strength)
  free_line ///< V ≡ 0 (constant mass only)
};

struct RunConfig {
  // model
  double a = 1.0;                ///< vacuum amplitude
  double m = 1.4142135623730951; ///< mass parameter (edge of the continuum)
  PotentialMode potential_mode = PotentialMode::cubic;
  double detuned_strength = 0.3; ///< bump height in detuned mode

  // grid: domain [-L, L] with N points, h = 2L/(N-1)
  double L = 40.0;
  int N = 1601;

  // spectral
  double kernel_tol = 1e-8;   ///< relative kernel threshold of eigensolves
  double Omega_max = 16.970562748477139;  ///< family coverage (default 12·m)
  double omega_margin = 1e-6; ///< distance of the first quadrature node to m
  int panels = 24;            ///< Gauss-Legendre nodes per frequency panel

  // expansion
  double recon_tol = 1e-2; ///< allowed sup-t V-norm reconstruction residual
  double quad_tol = 2e-2;  ///< allowed smeared-delta / Parseval defect

  // time
  double T = 20.0;
  double dt = 1e-2;

  std::uint64_t seed = 1;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Parse error with location context; `what()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error("config error (line " + std::to_string(line) +
                           "): " + message),
        line_(line) {}
  explicit ConfigError(const std::string& message)
      : std::runtime_error("config error: " + message), line_(0) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parse `section.key = value` text (# starts a comment, blank lines are
/// skipped) on top of the defaults. Throws ConfigError on unknown keys,
/// malformed values, or invariant violations (all tolerances positive, grid
/// usable, Omega_max above the mass).
RunConfig parse_config_text(const std::string& text);

/// Reads and parses a config file; throws ConfigError if unreadable.
RunConfig parse_config_file(const std::string& path);

/// Canonical serialization: fixed key order, 17 significant digits. The
/// output re-parses to an equal RunConfig and is byte-stable across runs.
std::string serialize_config(const RunConfig& config);

/// Validates the cross-field invariants (also called by the parser); throws
/// ConfigError naming the violated constraint.
void validate_config(const RunConfig& config);

std::string to_string(PotentialMode mode);

}  // namespace hamspec::cli
