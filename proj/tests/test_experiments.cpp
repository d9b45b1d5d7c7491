#include <stdexcept>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "flatlpp/experiments.hpp"
#include "flatlpp/plot.hpp"
#include "flatlpp/report.hpp"

using namespace flatlpp;
namespace fs = std::filesystem;

namespace {

fs::path test_dir(const std::string& leaf) {
  const fs::path p = fs::temp_directory_path() / "flatlpp_unit" / leaf;
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("experiment registry lists the twelve verification experiments") {
  const auto names = experiment_names();
  CHECK(names.size() == 12);
  for (const char* expected : {"sup_identity", "wall_vs_lpp", "sup_eig_vs_lpp",
                               "polymer_vs_loggamma", "density_normalization",
                               "kernel_identities", "rt_stationarity",
                               "cdf_consistency", "rmt_bridges",
                               "xarray_stationarity", "gradient_lemmas",
                               "lln_and_symmetry"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
    CHECK(experiment_registered(expected));
    CHECK(!experiment_summary(expected).empty());
  }
  CHECK(!experiment_registered("no_such_thing"));
}

TEST_CASE("unknown experiment names raise an error listing the registry") {
  ExperimentConfig cfg;
  cfg.experiment = "no_such_thing";
  try {
    run_experiment(cfg);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("no_such_thing") != std::string::npos);
    CHECK(msg.find("wall_vs_lpp") != std::string::npos);
  }
}

TEST_CASE("configs are validated before running") {
  ExperimentConfig cfg;
  cfg.experiment = "sup_identity";
  cfg.T = -1.0;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.T = 0.0;
  cfg.dt = -0.5;
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.dt = 0.0;
  cfg.drifts = {0.5, -1.0};
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.drifts = {0.5};
  cfg.n = 2;  // contradicts the drift vector
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg.n = 0;
  cfg.beta_list = {1.0, 0.0};
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("exact experiments pass with default settings") {
  for (const char* name : {"density_normalization", "kernel_identities",
                           "gradient_lemmas", "rt_stationarity"}) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    const Report rep = run_experiment(cfg);
    CHECK(rep.experiment == name);
    CHECK(rep.seed == cfg.seed);
    CHECK(!rep.metrics.empty());
    CHECK(rep.all_pass());
  }
}

TEST_CASE("reports are bit-identical apart from the wall clock") {
  ExperimentConfig cfg;
  cfg.experiment = "kernel_identities";
  Report a = run_experiment(cfg);
  Report b = run_experiment(cfg);
  a.wall_seconds = 0.0;
  b.wall_seconds = 0.0;
  CHECK(a.to_json().dump(2) == b.to_json().dump(2));
}

TEST_CASE("the report echoes the resolved configuration") {
  ExperimentConfig cfg;
  cfg.experiment = "density_normalization";
  const Report rep = run_experiment(cfg);
  CHECK(rep.config.at("experiment") == "density_normalization");
  CHECK(rep.config.at("n") == 3);
  const auto drifts = rep.config.at("drifts").get<std::vector<double>>();
  REQUIRE(drifts.size() == 3);
  CHECK(drifts[0] == 0.7);
  CHECK(drifts[2] == 1.6);
}

TEST_CASE("tolerance overrides flip the verdict") {
  ExperimentConfig cfg;
  cfg.experiment = "gradient_lemmas";
  cfg.tolerances["divergence_fd_sup"] = 1e-300;
  const Report rep = run_experiment(cfg);
  CHECK(!rep.all_pass());
  bool found = false;
  for (const Metric& m : rep.metrics) {
    if (m.name == "divergence_fd_sup") {
      found = true;
      CHECK(m.bound == 1e-300);
      CHECK(!m.pass());
    }
  }
  CHECK(found);
}

TEST_CASE("sampled experiments honour sample-size and tolerance settings") {
  ExperimentConfig cfg;
  cfg.experiment = "sup_identity";
  cfg.n_samples = 500;
  cfg.tolerances["terminal_ks_d"] = 0.2;
  const Report rep = run_experiment(cfg);
  CHECK(rep.all_pass());
  CHECK(rep.wall_seconds > 0.0);
  CHECK(rep.config.at("n_samples") == 500);
  bool found = false;
  for (const Metric& m : rep.metrics) {
    if (m.name == "terminal_ks_d") {
      found = true;
      CHECK(m.bound == 0.2);
    }
  }
  CHECK(found);
}

TEST_CASE("reports and plots are written to the output directory") {
  const fs::path dir = test_dir("outputs");
  fs::remove_all(dir);
  ExperimentConfig cfg;
  cfg.experiment = "sup_identity";
  cfg.n_samples = 400;
  cfg.tolerances["terminal_ks_d"] = 0.5;
  cfg.output_dir = dir.string();
  cfg.emit_plots = true;
  const Report rep = run_experiment(cfg);
  CHECK(rep.all_pass());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "report.csv"));

  const auto parsed = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(parsed.at("experiment") == "sup_identity");
  const Report back = Report::from_json(parsed);
  REQUIRE(back.metrics.size() == rep.metrics.size());
  for (std::size_t k = 0; k < back.metrics.size(); ++k) {
    CHECK(back.metrics[k].name == rep.metrics[k].name);
    CHECK(back.metrics[k].value == rep.metrics[k].value);
    CHECK(back.metrics[k].bound == rep.metrics[k].bound);
    CHECK(back.metrics[k].gate == rep.metrics[k].gate);
  }

  // CSV: header plus one row per metric.
  const std::string csv = slurp(dir / "report.csv");
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        rep.metrics.size() + 1);
  CHECK(csv.rfind("name,value,gate,bound,pass", 0) == 0);

  bool have_svg = false;
  if (fs::exists(dir / "plots")) {
    for (const auto& entry : fs::directory_iterator(dir / "plots")) {
      if (entry.path().extension() == ".svg") {
        have_svg = true;
        CHECK(slurp(entry.path()).find("<svg") != std::string::npos);
      }
    }
  }
  CHECK(have_svg);
  fs::remove_all(dir);
}

TEST_CASE("metric gates") {
  Report rep;
  rep.add_below("small", 1e-12, 1e-10);
  rep.add_below("too_big", 2.0, 1.0);
  rep.add_above("p_ok", 0.3, 0.01);
  rep.add_info("note", 42.0);
  CHECK(rep.metrics[0].pass());
  CHECK(!rep.metrics[1].pass());
  CHECK(rep.metrics[2].pass());
  CHECK(rep.metrics[3].pass());  // info lines never gate
  CHECK(!rep.all_pass());
  const std::string csv = rep.to_csv();
  CHECK(csv.find("small,1e-12,below,1e-10,1") != std::string::npos);
  CHECK(csv.find("too_big,2,below,1,0") != std::string::npos);
  CHECK(csv.find("note,42,info,") != std::string::npos);
}

TEST_CASE("atomic text writes create parent directories") {
  const fs::path dir = test_dir("atomic");
  fs::remove_all(dir);
  const fs::path target = dir / "a" / "b" / "out.txt";
  write_text_atomic(target.string(), "payload\n");
  CHECK(slurp(target) == "payload\n");
  CHECK(!fs::exists(target.string() + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("plots validate their inputs and emit SVG") {
  const fs::path dir = test_dir("plots");
  std::vector<PlotSeries> series(1);
  series[0].label = "sample A";
  for (int i = 0; i < 200; ++i) series[0].sample.push_back(0.01 * i);
  std::vector<PlotCurve> curves(1);
  curves[0].label = "reference";
  curves[0].f = [](double x) { return std::min(1.0, std::max(0.0, x / 2.0)); };
  PlotOptions opt;
  opt.title = "test overlay";
  const fs::path ecdf = dir / "ecdf.svg";
  plot_ecdf_overlay(ecdf.string(), series, curves, opt);
  const std::string svg = slurp(ecdf);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("sample A") != std::string::npos);
  CHECK(svg.find("reference") != std::string::npos);

  const fs::path hist = dir / "hist.svg";
  plot_histogram_density(hist.string(), series[0].sample, 20, curves[0], opt);
  CHECK(slurp(hist).find("<svg") != std::string::npos);

  CHECK_THROWS_AS(
      plot_ecdf_overlay((dir / "bad.svg").string(), std::vector<PlotSeries>{},
                        curves, opt),
      std::invalid_argument);
  std::vector<PlotSeries> empty_series(1);
  empty_series[0].label = "empty";
  CHECK_THROWS_AS(plot_ecdf_overlay((dir / "bad.svg").string(), empty_series,
                                    curves, opt),
                  std::invalid_argument);
  CHECK_THROWS_AS(plot_histogram_density((dir / "bad.svg").string(),
                                         series[0].sample, 0, curves[0], opt),
                  std::invalid_argument);
  CHECK_THROWS_AS(plot_histogram_density((dir / "bad.svg").string(),
                                         std::vector<double>{}, 10, curves[0],
                                         opt),
                  std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("experiment configs round-trip through JSON") {
  nlohmann::json j;
  j["experiment"] = "wall_vs_lpp";
  j["n"] = 3;
  j["drifts"] = {0.7, 1.0, 1.6};
  j["n_samples"] = 1000;
  j["T"] = 12.5;
  j["dt"] = 0.002;
  j["beta_list"] = {2.0, 4.0};
  j["seed"] = 777;
  j["tolerances"] = {{"energy_p", 0.05}};
  j["output_dir"] = "somewhere";
  j["emit_plots"] = true;
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.experiment == "wall_vs_lpp");
  CHECK(cfg.n == 3);
  CHECK(cfg.drifts == std::vector<double>{0.7, 1.0, 1.6});
  CHECK(cfg.n_samples == 1000);
  CHECK(cfg.T == 12.5);
  CHECK(cfg.dt == 0.002);
  CHECK(cfg.beta_list == std::vector<double>{2.0, 4.0});
  CHECK(cfg.seed == 777);
  CHECK(cfg.tolerances.at("energy_p") == 0.05);
  CHECK(cfg.output_dir == "somewhere");
  CHECK(cfg.emit_plots);
  const nlohmann::json echo = cfg.to_json();
  CHECK(ExperimentConfig::from_json(echo).to_json() == echo);
  // Defaults survive a partial document.
  const ExperimentConfig bare =
      ExperimentConfig::from_json(nlohmann::json{{"experiment", "sup_identity"}});
  CHECK(bare.seed == 20260825);
  CHECK(bare.n == 0);
  CHECK(bare.drifts.empty());
}
