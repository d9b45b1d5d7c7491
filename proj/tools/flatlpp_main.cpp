// Command-line front end: named verification experiments, raw simulation
// dumps, closed-form density evaluation and SVG plots.
//
// Exit codes: 0 all requested checks pass, 1 a gated metric or computation
// failed, 2 usage or configuration error.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flatlpp/determinantal.hpp"
#include "flatlpp/experiments.hpp"
#include "flatlpp/lpp.hpp"
#include "flatlpp/polymer.hpp"
#include "flatlpp/random_matrices.hpp"
#include "flatlpp/reflected.hpp"
#include "flatlpp/report.hpp"
#include "flatlpp/rng.hpp"
#include "flatlpp/weight_field.hpp"
#include "json.hpp"

namespace {

using namespace flatlpp;

std::string default_output_dir() {
  const char* env = std::getenv("FLATLPP_OUTPUT_DIR");
  return env ? std::string(env) : std::string();
}

struct ExperimentCli {
  std::string name;
  std::string config_file;
  std::string out = default_output_dir();
  bool plots = false;
  int n = 0;
  std::vector<double> drifts;
  int samples = 0;
  double T = 0.0;
  double dt = 0.0;
  std::vector<double> betas;
  std::uint64_t seed = 0;
  std::vector<std::string> tols;
  CLI::Option* seed_opt = nullptr;
};

void add_experiment_options(CLI::App* sub, ExperimentCli& o) {
  sub->add_option("experiment", o.name, "registered experiment name");
  sub->add_option("--config", o.config_file, "JSON configuration file");
  sub->add_option("--n", o.n, "system size override");
  sub->add_option("--drifts", o.drifts, "drift vector override")->delimiter(',');
  sub->add_option("--samples", o.samples, "sample count override");
  sub->add_option("--T", o.T, "time horizon override");
  sub->add_option("--dt", o.dt, "step size override");
  sub->add_option("--betas", o.betas, "inverse temperatures")->delimiter(',');
  o.seed_opt = sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--out", o.out,
                  "output directory (default: $FLATLPP_OUTPUT_DIR, else none)");
  sub->add_flag("--plots", o.plots, "write SVG plots under <out>/plots");
  sub->add_option("--tol", o.tols, "gate override metric=bound (repeatable)");
}

ExperimentConfig build_config(const ExperimentCli& o) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw std::invalid_argument("cannot read config file " + o.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config file " + o.config_file + ": " + e.what());
    }
    cfg = ExperimentConfig::from_json(j);
  }
  if (!o.name.empty()) cfg.experiment = o.name;
  if (cfg.experiment.empty())
    throw std::invalid_argument("no experiment given (positional or in --config)");
  if (o.n > 0) cfg.n = o.n;
  if (!o.drifts.empty()) cfg.drifts = o.drifts;
  if (o.samples > 0) cfg.n_samples = o.samples;
  if (o.T > 0.0) cfg.T = o.T;
  if (o.dt > 0.0) cfg.dt = o.dt;
  if (!o.betas.empty()) cfg.beta_list = o.betas;
  if (o.seed_opt && o.seed_opt->count() > 0) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.plots) cfg.emit_plots = true;
  for (const std::string& t : o.tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--tol expects metric=bound, got " + t);
    cfg.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
  }
  return cfg;
}

int report_outcome(const Report& rep) {
  std::printf("experiment %s (seed %llu, %.1f s)\n", rep.experiment.c_str(),
              static_cast<unsigned long long>(rep.seed), rep.wall_seconds);
  for (const Metric& m : rep.metrics) {
    if (m.gate == Metric::Gate::info) {
      std::printf("  %-34s %12.6g\n", m.name.c_str(), m.value);
    } else {
      std::printf("  %-34s %12.6g %s %-10.4g %s\n", m.name.c_str(), m.value,
                  m.gate == Metric::Gate::below ? "<" : ">", m.bound,
                  m.pass() ? "pass" : "FAIL");
    }
  }
  std::printf("%s: %s\n", rep.experiment.c_str(), rep.all_pass() ? "PASS" : "FAIL");
  return rep.all_pass() ? 0 : 1;
}

std::vector<double> parse_drifts_or(const std::vector<double>& drifts,
                                    std::vector<double> fallback) {
  return drifts.empty() ? std::move(fallback) : drifts;
}

struct SimulateCli {
  std::string what;
  std::string out = default_output_dir();
  int n = 0;
  std::vector<double> drifts;
  double T = 10.0;
  double dt = 1e-3;
  std::uint64_t seed = 20260825;
  int replicas = 1;
  int stride = 100;
};

int run_simulate(const SimulateCli& o) {
  namespace fs = std::filesystem;
  const std::string out = o.out.empty() ? std::string("flatlpp_out") : o.out;
  const fs::path dumps = fs::path(out) / "env_dumps";
  fs::create_directories(dumps);

  if (o.what == "lpp" || o.what == "polymer") {
    const auto kind =
        o.what == "lpp" ? WeightKind::exponential : WeightKind::inverse_gamma;
    const auto drifts = parse_drifts_or(o.drifts, {0.7, 1.0, 1.6});
    for (int r = 0; r < o.replicas; ++r) {
      auto env = WeightField::flat_triangle(drifts, kind, o.seed, r);
      const fs::path csv = dumps / (o.what + "_env_" + std::to_string(r) + ".csv");
      env.dump_csv(csv.string());
      if (o.what == "lpp") {
        auto row = FlatLppField(env).first_row_reversed();
        std::printf("replica %d passage times:", r);
        for (double v : row) std::printf(" %.6f", v);
        std::printf("\n");
      } else {
        std::printf("replica %d log partition %.6f\n", r,
                    PolymerField(env).log_partition(1, 1));
      }
      std::printf("  wrote %s\n", csv.string().c_str());
    }
    return 0;
  }
  if (o.what == "wall") {
    const auto drifts = parse_drifts_or(o.drifts, {0.7, 1.6});
    for (int r = 0; r < o.replicas; ++r) {
      PathBundle paths(static_cast<int>(drifts.size()), o.T, o.dt, o.seed, r);
      auto traj = wall_trajectory_refined(paths, drifts);
      const fs::path csv = dumps / ("wall_traj_" + std::to_string(r) + ".csv");
      std::string body = "t";
      for (std::size_t j = 1; j <= drifts.size(); ++j)
        body += ",y" + std::to_string(j);
      body += "\n";
      for (std::size_t k = 0; k < traj.size();
           k += static_cast<std::size_t>(o.stride)) {
        body += std::to_string(paths.time(static_cast<int>(k)));
        for (double v : traj[k]) body += "," + std::to_string(v);
        body += "\n";
      }
      write_text_atomic(csv.string(), body);
      std::printf("replica %d terminal:", r);
      for (double v : traj.back()) std::printf(" %.6f", v);
      std::printf("\n  wrote %s\n", csv.string().c_str());
    }
    return 0;
  }
  if (o.what == "xarray") {
    const auto drifts = parse_drifts_or(o.drifts, {0.7, 1.3});
    const int n = static_cast<int>(drifts.size());
    for (int r = 0; r < o.replicas; ++r) {
      // snapshots at stride intervals: rerun from the previous snapshot state
      std::string body = "t,i,j,value\n";
      XArrayState state(n);
      const double chunk = o.T / 10.0;
      double t = 0.0;
      for (int s = 0; s < 10; ++s) {
        auto sim = x_array_simulate(drifts, state, chunk, o.dt,
                                    XDirection::forward, hash_combine(o.seed, s), r);
        state = sim.state;
        t += chunk;
        for (int i = 1; i <= n; ++i)
          for (int j = 1; i + j <= n + 1; ++j)
            body += std::to_string(t) + "," + std::to_string(i) + "," +
                    std::to_string(j) + "," + std::to_string(state.at(i, j)) + "\n";
      }
      const fs::path csv = dumps / ("xarray_traj_" + std::to_string(r) + ".csv");
      write_text_atomic(csv.string(), body);
      std::printf("replica %d final top cell %.6f\n  wrote %s\n", r, state.at(1, 1),
                  csv.string().c_str());
    }
    return 0;
  }
  if (o.what == "matrix") {
    const auto drifts = parse_drifts_or(o.drifts, {0.7, 1.6});
    for (int r = 0; r < o.replicas; ++r) {
      const double sup = sup_lambda_max(drifts, o.T, o.dt, true, o.seed, r);
      auto ev = sample_sym_lue(drifts, hash_combine(o.seed, 1), r);
      std::printf("replica %d sup eigenvalue %.6f; symmetric ensemble:", r, sup);
      for (double v : ev) std::printf(" %.6f", v);
      std::printf("\n");
    }
    return 0;
  }
  throw std::invalid_argument("unknown --what " + o.what +
                              " (wall, lpp, polymer, xarray, matrix)");
}

struct DensityCli {
  std::string which;
  int n = 0;
  std::vector<double> drifts;
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.5;
};

int run_density(const DensityCli& o) {
  auto spec = [&](std::size_t need) {
    if (o.drifts.size() != need)
      throw std::invalid_argument("expected " + std::to_string(need) + " drifts");
    bool equal = true;
    for (double d : o.drifts) equal = equal && d == o.drifts.front();
    return equal ? DriftSpec::equal(static_cast<int>(need), o.drifts.front())
                 : DriftSpec::distinct(o.drifts);
  };
  if (o.which == "pi") {
    if (o.x.empty()) throw std::invalid_argument("--x gives the ordered point");
    std::printf("%.12g\n", eval_pi_distinct(spec(o.x.size()), OrderedVector(o.x)));
    return 0;
  }
  if (o.which == "pi_bar") {
    if (o.x.empty()) throw std::invalid_argument("--x gives the ordered point");
    std::printf("%.12g\n", eval_pi_bar(static_cast<int>(o.x.size()), OrderedVector(o.x)));
    return 0;
  }
  if (o.which == "rt") {
    if (o.x.empty() || o.y.size() != o.x.size())
      throw std::invalid_argument("--x and --y give ordered points of equal length");
    std::printf("%.12g\n", eval_r_t(spec(o.x.size()), o.t, OrderedVector(o.x),
                                    OrderedVector(o.y)));
    return 0;
  }
  if (o.which == "cdf_top") {
    if (o.drifts.empty()) throw std::invalid_argument("--drifts required");
    auto s = spec(o.drifts.size());
    for (double v : o.x) std::printf("%.12g\n", eval_cdf_top(s, v));
    return 0;
  }
  if (o.which == "cdf_toda") {
    if (o.n < 1) throw std::invalid_argument("--n required");
    for (double v : o.x) std::printf("%.12g\n", eval_cdf_toda(o.n, v));
    return 0;
  }
  if (o.which == "eigen") {
    if (o.x.empty()) throw std::invalid_argument("--x gives the ordered eigenvalues");
    std::printf("%.12g\n",
                eval_exp_det_density(spec(o.x.size()), OrderedVector(o.x)));
    return 0;
  }
  throw std::invalid_argument("unknown --which " + o.which +
                              " (pi, pi_bar, rt, cdf_top, cdf_toda, eigen)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification toolkit for reflected particle systems, "
               "last-passage times, polymers and matrix ensembles"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "list registered experiments");

  ExperimentCli verify_opts;
  auto* verify_cmd =
      app.add_subcommand("verify", "run a registered experiment and gate its metrics");
  add_experiment_options(verify_cmd, verify_opts);

  ExperimentCli plot_opts;
  auto* plot_cmd =
      app.add_subcommand("plot", "run an experiment with SVG plot output");
  add_experiment_options(plot_cmd, plot_opts);

  SimulateCli sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "run a sampler and dump CSVs");
  sim_cmd->add_option("--what", sim_opts.what, "wall, lpp, polymer, xarray or matrix")
      ->required();
  sim_cmd->add_option("--n", sim_opts.n);
  sim_cmd->add_option("--drifts", sim_opts.drifts)->delimiter(',');
  sim_cmd->add_option("--T", sim_opts.T);
  sim_cmd->add_option("--dt", sim_opts.dt);
  sim_cmd->add_option("--seed", sim_opts.seed);
  sim_cmd->add_option("--replicas", sim_opts.replicas);
  sim_cmd->add_option("--stride", sim_opts.stride, "snapshot stride in steps");
  sim_cmd->add_option("--out", sim_opts.out, "output directory");

  DensityCli den_opts;
  auto* den_cmd =
      app.add_subcommand("density", "evaluate a closed-form density or CDF");
  den_cmd->add_option("--which", den_opts.which,
                      "pi, pi_bar, rt, cdf_top, cdf_toda or eigen")
      ->required();
  den_cmd->add_option("--n", den_opts.n);
  den_cmd->add_option("--drifts", den_opts.drifts)->delimiter(',');
  den_cmd->add_option("--x", den_opts.x)->delimiter(',');
  den_cmd->add_option("--y", den_opts.y)->delimiter(',');
  den_cmd->add_option("--t", den_opts.t, "transition horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const std::string& name : experiment_names())
        std::printf("%-24s %s\n", name.c_str(), experiment_summary(name).c_str());
      return 0;
    }
    if (verify_cmd->parsed()) return report_outcome(run_experiment(build_config(verify_opts)));
    if (plot_cmd->parsed()) {
      ExperimentConfig cfg = build_config(plot_opts);
      cfg.emit_plots = true;
      if (cfg.output_dir.empty()) cfg.output_dir = "flatlpp_out";
      return report_outcome(run_experiment(cfg));
    }
    if (sim_cmd->parsed()) return run_simulate(sim_opts);
    if (den_cmd->parsed()) return run_density(den_opts);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
