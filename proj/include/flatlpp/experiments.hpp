// Named, reproducible verification experiments tying the samplers to the
// closed-form laws: each experiment resolves its defaults, runs the
// comparison, and returns a Report whose gated metrics decide pass/fail.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flatlpp/report.hpp"
#include "json.hpp"

namespace flatlpp {

// Zero / empty numeric fields mean "use the experiment's default"; the
// report echoes the fully resolved configuration.
struct ExperimentConfig {
  std::string experiment;
  int n = 0;
  std::vector<double> drifts;
  int n_samples = 0;
  double T = 0.0;
  double dt = 0.0;
  std::vector<double> beta_list;
  std::uint64_t seed = 20260825;
  std::map<std::string, double> tolerances;  // per-metric gate overrides
  std::string output_dir;  // empty: no files written
  bool emit_plots = false;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_names();
bool experiment_registered(const std::string& name);
std::string experiment_summary(const std::string& name);

// Deterministic given (config, seed). Writes report.json / report.csv (and
// plots/ when enabled) under output_dir when set. Throws
// std::invalid_argument for unknown experiments or invalid configs.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace flatlpp
