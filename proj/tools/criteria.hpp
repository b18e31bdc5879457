#pragma once
// The acceptance suite: twelve numbered end-to-end criteria, each returning
// a pass/fail verdict plus the measured quantities that justify it. Shared
// between `validate` (JSON report) and the standalone acceptance runner.

#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace hamspec::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;            ///< human-readable "measured vs allowed"
  double seconds = 0.0;          ///< wall-clock of this criterion
  nlohmann::json measurements;   ///< numeric payload for validation.json
};

/// Runs criteria 1–12 in order. Never throws: an exception inside a
/// criterion marks it failed with the explanation in `detail`. The
/// config supplies the model/grid parameters and tolerance knobs; at the
/// default config this is exactly the pinned acceptance configuration.
std::vector<CriterionResult> run_all_criteria(const RunConfig& config);

}  // namespace hamspec::cli
