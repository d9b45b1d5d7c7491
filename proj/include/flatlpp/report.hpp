// Experiment reports: named metrics with pass/fail gates, JSON and CSV
// serialization, and atomic file writes (temp file + rename).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace flatlpp {

// One measured quantity. A metric passes when the value respects the gate;
// informational metrics always pass.
struct Metric {
  enum class Gate { below, above, info };

  std::string name;
  double value = 0.0;
  Gate gate = Gate::info;
  double bound = 0.0;

  bool pass() const;
};

struct Report {
  std::string experiment;
  nlohmann::json config;  // echo of the resolved configuration
  std::vector<Metric> metrics;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;

  void add_below(const std::string& name, double value, double bound);
  void add_above(const std::string& name, double value, double bound);
  void add_info(const std::string& name, double value);
  // Every gated metric passes.
  bool all_pass() const;

  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);
  // Header row plus one metric per row: name,value,gate,bound,pass.
  std::string to_csv() const;
};

// Writes content to path via a sibling temp file and an atomic rename;
// throws std::runtime_error on I/O failure. Parent directories are created.
void write_text_atomic(const std::string& path, const std::string& content);

// report.json and report.csv under dir.
void write_report_files(const Report& report, const std::string& dir);

}  // namespace flatlpp
