#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hamspec::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "key '" + key + "': not a number: '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  try {
    size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "key '" + key + "': not an integer: '" + v + "'");
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(PotentialMode mode) {
  switch (mode) {
    case PotentialMode::cubic:
      return "cubic";
    case PotentialMode::detuned:
      return "detuned";
    case PotentialMode::free_line:
      return "free";
  }
  return "cubic";
}

void validate_config(const RunConfig& c) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw ConfigError(std::string(name) + " must be positive");
    }
  };
  positive(c.a, "model.a");
  positive(c.m, "model.m");
  positive(c.L, "grid.L");
  if (c.N < 3) {
    throw ConfigError("grid.N must be at least 3");
  }
  positive(c.kernel_tol, "spectral.kernel_tol");
  positive(c.omega_margin, "spectral.omega_margin");
  if (c.panels < 2) {
    throw ConfigError("spectral.panels must be at least 2");
  }
  if (!(c.Omega_max > c.m + c.omega_margin)) {
    throw ConfigError("spectral.Omega_max must exceed model.m + omega_margin");
  }
  positive(c.recon_tol, "expansion.recon_tol");
  positive(c.quad_tol, "expansion.quad_tol");
  positive(c.T, "time.T");
  positive(c.dt, "time.dt");
  if (c.output_dir.empty()) {
    throw ConfigError("output_dir must be non-empty");
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected 'key = value', got '" + trim(raw) + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ConfigError(line_no, "empty key or value");
    }

    if (key == "model.a") {
      c.a = parse_double(val, line_no, key);
    } else if (key == "model.m") {
      c.m = parse_double(val, line_no, key);
    } else if (key == "model.potential_mode") {
      if (val == "cubic") {
        c.potential_mode = PotentialMode::cubic;
      } else if (val == "detuned") {
        c.potential_mode = PotentialMode::detuned;
      } else if (val == "free") {
        c.potential_mode = PotentialMode::free_line;
      } else {
        throw ConfigError(line_no, "key 'model.potential_mode': expected "
                                   "cubic|detuned|free, got '" + val + "'");
      }
    } else if (key == "model.detuned_strength") {
      c.detuned_strength = parse_double(val, line_no, key);
    } else if (key == "grid.L") {
      c.L = parse_double(val, line_no, key);
    } else if (key == "grid.N") {
      c.N = static_cast<int>(parse_int(val, line_no, key));
    } else if (key == "spectral.kernel_tol") {
      c.kernel_tol = parse_double(val, line_no, key);
    } else if (key == "spectral.Omega_max") {
      c.Omega_max = parse_double(val, line_no, key);
    } else if (key == "spectral.omega_margin") {
      c.omega_margin = parse_double(val, line_no, key);
    } else if (key == "spectral.panels") {
      c.panels = static_cast<int>(parse_int(val, line_no, key));
    } else if (key == "expansion.recon_tol") {
      c.recon_tol = parse_double(val, line_no, key);
    } else if (key == "expansion.quad_tol") {
      c.quad_tol = parse_double(val, line_no, key);
    } else if (key == "time.T") {
      c.T = parse_double(val, line_no, key);
    } else if (key == "time.dt") {
      c.dt = parse_double(val, line_no, key);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(val, line_no, key));
    } else if (key == "output_dir") {
      c.output_dir = val;
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "model.a = " << fmt(c.a) << "\n";
  out << "model.m = " << fmt(c.m) << "\n";
  out << "model.potential_mode = " << to_string(c.potential_mode) << "\n";
  out << "model.detuned_strength = " << fmt(c.detuned_strength) << "\n";
  out << "grid.L = " << fmt(c.L) << "\n";
  out << "grid.N = " << c.N << "\n";
  out << "spectral.kernel_tol = " << fmt(c.kernel_tol) << "\n";
  out << "spectral.Omega_max = " << fmt(c.Omega_max) << "\n";
  out << "spectral.omega_margin = " << fmt(c.omega_margin) << "\n";
  out << "spectral.panels = " << c.panels << "\n";
  out << "expansion.recon_tol = " << fmt(c.recon_tol) << "\n";
  out << "expansion.quad_tol = " << fmt(c.quad_tol) << "\n";
  out << "time.T = " << fmt(c.T) << "\n";
  out << "time.dt = " << fmt(c.dt) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "output_dir = " << c.output_dir << "\n";
  return out.str();
}

}  // namespace hamspec::cli
