#include "flatlpp/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flatlpp {

namespace {

const char* gate_name(Metric::Gate g) {
  switch (g) {
    case Metric::Gate::below:
      return "below";
    case Metric::Gate::above:
      return "above";
    default:
      return "info";
  }
}

Metric::Gate gate_from_name(const std::string& s) {
  if (s == "below") return Metric::Gate::below;
  if (s == "above") return Metric::Gate::above;
  if (s == "info") return Metric::Gate::info;
  throw std::runtime_error("unknown metric gate: " + s);
}

// Shortest decimal form that round-trips, so serialized reports are
// bit-identical across runs with the same metric values.
std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

bool Metric::pass() const {
  switch (gate) {
    case Gate::below:
      return value < bound;
    case Gate::above:
      return value > bound;
    default:
      return true;
  }
}

void Report::add_below(const std::string& name, double value, double bound) {
  metrics.push_back({name, value, Metric::Gate::below, bound});
}

void Report::add_above(const std::string& name, double value, double bound) {
  metrics.push_back({name, value, Metric::Gate::above, bound});
}

void Report::add_info(const std::string& name, double value) {
  metrics.push_back({name, value, Metric::Gate::info, 0.0});
}

bool Report::all_pass() const {
  for (const Metric& m : metrics)
    if (!m.pass()) return false;
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json out;
  out["experiment"] = experiment;
  out["config"] = config;
  out["seed"] = seed;
  out["wall_seconds"] = wall_seconds;
  out["pass"] = all_pass();
  auto arr = nlohmann::json::array();
  for (const Metric& m : metrics) {
    arr.push_back({{"name", m.name},
                   {"value", m.value},
                   {"gate", gate_name(m.gate)},
                   {"bound", m.bound},
                   {"pass", m.pass()}});
  }
  out["metrics"] = arr;
  return out;
}

Report Report::from_json(const nlohmann::json& j) {
  Report r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config = j.at("config");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  for (const auto& m : j.at("metrics")) {
    r.metrics.push_back({m.at("name").get<std::string>(),
                         m.at("value").get<double>(),
                         gate_from_name(m.at("gate").get<std::string>()),
                         m.at("bound").get<double>()});
  }
  return r;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "name,value,gate,bound,pass\n";
  for (const Metric& m : metrics) {
    out << m.name << ',' << format_double(m.value) << ',' << gate_name(m.gate)
        << ',' << format_double(m.bound) << ',' << (m.pass() ? "1" : "0")
        << '\n';
  }
  return out.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw std::runtime_error("rename failed: " + target.string() + ": " + ec.message());
}

void write_report_files(const Report& report, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  write_text_atomic((base / "report.json").string(), report.to_json().dump(2) + "\n");
  write_text_atomic((base / "report.csv").string(), report.to_csv());
}

}  // namespace flatlpp
