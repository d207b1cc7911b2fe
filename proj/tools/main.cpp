#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <iostream>
#include <sstream>
#include <thread>

#include "config.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace dlqr::tools;

namespace {

struct Job {
  std::string label;
  std::optional<ScenarioConfig> cfg;
  int code = 0;
  std::string log;
};

std::vector<Job> Collect(const std::vector<std::string>& scenarios,
                         const std::vector<std::string>& configs,
                         const std::string& output_dir) {
  std::vector<Job> jobs;
  auto place = [&](ScenarioConfig& c) {
    if (!output_dir.empty()) c.output_dir = fs::path(output_dir) / c.name;
  };
  auto fail = [&](Job& j, const std::string& name, const ConfigError& e) {
    j.code = kExitConfig;
    j.log = j.label + ": config error: " + e.what() + "\n";
    const fs::path dir = fs::path(output_dir.empty() ? "out" : output_dir) / name;
    WriteDiagnostics(dir, name, kExitConfig, "Config", e.what());
  };
  for (const std::string& s : scenarios) {
    Job j{s, std::nullopt, 0, ""};
    try {
      j.cfg = BuiltinScenario(s);
      place(*j.cfg);
    } catch (const ConfigError& e) {
      fail(j, s, e);
    }
    jobs.push_back(std::move(j));
  }
  for (const std::string& path : configs) {
    Job j{path, std::nullopt, 0, ""};
    try {
      j.cfg = LoadConfig(path);
      place(*j.cfg);
    } catch (const ConfigError& e) {
      fail(j, fs::path(path).stem().string(), e);
    } catch (const dlqr::Error& e) {
      // The problem description itself was rejected while assembling it.
      j.code = e.category() == dlqr::ErrorCategory::kConfig ? kExitConfig
               : e.category() == dlqr::ErrorCategory::kAssumption ? kExitAssumption
                                                                  : kExitNumerical;
      j.log = path + ": " + e.what() + "\n";
      const std::string name = fs::path(path).stem().string();
      WriteDiagnostics(fs::path(output_dir.empty() ? "out" : output_dir) / name, name, j.code,
                       std::string(dlqr::ToString(e.code())), e.what());
    }
    jobs.push_back(std::move(j));
  }
  return jobs;
}

int Execute(std::vector<Job>& jobs, bool verify, int n_jobs) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      Job& j = jobs[i];
      if (!j.cfg) continue;
      std::ostringstream log;
      j.code = verify ? VerifyScenario(*j.cfg, log) : RunScenario(*j.cfg, log);
      j.log = log.str();
    }
  };
  const int n = std::clamp(n_jobs, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
  }
  int code = 0;
  for (const Job& j : jobs) {
    std::cout << j.log;
    code = std::max(code, j.code);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon LQ feedback for index-0 descriptor systems"};
  app.require_subcommand(1);

  std::vector<std::string> scenarios, configs;
  std::string output_dir;
  int n_jobs = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-s,--scenario", scenarios, "built-in scenario (repeatable)");
    sub->add_option("-c,--config", configs, "JSON scenario file (repeatable)");
    sub->add_option("-o,--output-dir", output_dir,
                    "write each scenario to <dir>/<name> instead of its configured directory");
    sub->add_option("-j,--jobs", n_jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "run scenarios and write artifacts");
  add_common(run);
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite and report pass/fail");
  add_common(verify);
  CLI::App* list = app.add_subcommand("list", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (list->parsed()) {
    for (const std::string& s : BuiltinScenarioNames()) std::cout << s << '\n';
    return 0;
  }
  if (scenarios.empty() && configs.empty()) {
    std::cerr << "nothing to do: give --scenario or --config\n";
    return kExitConfig;
  }
  std::vector<Job> jobs = Collect(scenarios, configs, output_dir);
  return Execute(jobs, verify->parsed(), n_jobs);
}
