#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlqr/dlqr.hpp"

namespace dlqr::tools {

/// Malformed or unreadable configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double tol_proj = 1e-8;
  double rank_tol = 1e-10;
  double cond_max = 1e12;
  double tol_weights = 1e-8;
  double tol_alg = 1e-10;
  double tol_dre = 1e-6;
  double dre_rtol = 1e-9;
  double dre_atol = 1e-12;
  double tol_opt = 1e-4;
  double tol_fp = 1e-8;
  int picard_max_iter = 200;
  double tol_consist = 1e-9;
  double tol_pf = 1e-5;
  double tol_restart = 1e-5;
  double tol_cost = 1e-3;
  double tol_picard = 1e-4;
  double tol_oracle = 1e-2;
  double tol_lqr = 1e-6;
};

struct Checks {
  bool picard = false;
  bool oracle = false;
  int oracle_steps = 400;
};

struct ScenarioConfig {
  std::string name;
  std::optional<Problem> problem;  // always set by the loaders
  std::size_t n_output_nodes = 601;
  Checks checks;
  Tolerances tol;
  std::filesystem::path output_dir;
  bool semi_explicit = false;
  std::uint64_t seed = 0x5EED;
  /// Random instance seed for lqr-reduction style problems, if any.
  std::optional<std::uint64_t> instance_seed;

  PipelineOptions Options() const;
};

/// Reads a JSON scenario file. Relative CSV references and output_dir are
/// resolved against the file's directory. Throws ConfigError, or dlqr::Error
/// when the described problem itself is rejected during assembly.
ScenarioConfig LoadConfig(const std::filesystem::path& path);

/// Parses a JSON document already in memory.
ScenarioConfig ParseConfig(const std::string& text,
                           const std::filesystem::path& base_dir);

/// paper-example, paper-example-small, lqr-reduction, scalar.
ScenarioConfig BuiltinScenario(const std::string& name);

std::vector<std::string> BuiltinScenarioNames();

}  // namespace dlqr::tools
