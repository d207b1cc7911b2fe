#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace dlqr::tools {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitAssumption = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

/// Pipeline plus artifacts: trajectory.csv, control.csv, riccati.csv,
/// summary.json and SVG plots in cfg.output_dir. On failure writes
/// diagnostics.json there instead and returns the matching exit code.
int RunScenario(const ScenarioConfig& cfg, std::ostream& log);

/// Pipeline plus the invariant suite; prints one line per check and writes
/// verify.json. Returns kExitCheckFailed if any check fails.
int VerifyScenario(const ScenarioConfig& cfg, std::ostream& log);

/// Writes diagnostics.json for a failure that happened before a config was
/// available (unreadable or malformed file).
void WriteDiagnostics(const std::filesystem::path& dir, const std::string& scenario,
                      int exit_code, const std::string& error,
                      const std::string& message);

}  // namespace dlqr::tools
