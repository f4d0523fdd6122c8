// herdlab: experiment runner for the social-learning laboratory.
//
// Subcommands mirror the library's runners; every one takes an optional
// JSON config, a seed override, and an output path, and exits 0 on
// success, 2 on a config problem, 3 on a runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "herd/errors.hpp"
#include "herd/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string sensor = "synthetic";
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& out_name,
                bool with_sensor) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--seed", args.seed, "master seed override");
  cmd->add_option("--out", args.out, "output path")->default_val(out_name);
  if (with_sensor) {
    cmd->add_option("--sensor", args.sensor,
                    "observation source: synthetic|remote|cached")
        ->default_val("synthetic");
  }
}

// Config problems exit 2 before any experiment code runs.
nlohmann::json load_config(const CommonArgs& args,
                           const std::string& subcommand) {
  nlohmann::json config = nlohmann::json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      throw herd::Error("config: cannot open " + args.config_path);
    }
    try {
      config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw herd::Error("config: " + args.config_path + " is not valid JSON: " +
                        e.what());
    }
  }
  if (args.seed.has_value()) {
    config["seed"] = *args.seed;
  }
  return herd::normalize_config(subcommand, std::move(config));
}

void emit(const herd::ResultTable& table, const std::string& path) {
  herd::write_csv(table, path);
  std::cout << "wrote " << table.rows.size() << " rows to " << path << "\n";
}

void emit(const nlohmann::json& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw herd::EmptyData("cannot open " + path);
  }
  out << report.dump(2) << "\n";
  std::cout << "wrote report to " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"herdlab: Bayesian social learning experiments"};
  app.set_version_flag("--version", std::string("herdlab ") + herd::kVersion);
  app.require_subcommand(1);

  CommonArgs herding, threshold, oracle, structure, rbm, probe;
  CLI::App* cmd_herding = app.add_subcommand(
      "simulate-herding", "Monte Carlo cascade sweep over priors and states");
  add_common(cmd_herding, herding, "herding.csv", false);
  CLI::App* cmd_threshold = app.add_subcommand(
      "simulate-threshold", "threshold-policy sweep of the stopping problem");
  add_common(cmd_threshold, threshold, "threshold.csv", false);
  CLI::App* cmd_oracle = app.add_subcommand(
      "solve-oracle", "value iteration on the two-state belief grid");
  add_common(cmd_oracle, oracle, "oracle.csv", false);
  CLI::App* cmd_structure = app.add_subcommand(
      "check-structure", "evaluate the threshold-optimality conditions");
  add_common(cmd_structure, structure, "structure.json", false);
  CLI::App* cmd_rbm = app.add_subcommand(
      "train-rbm", "fit per-state likelihood rows from sensed flag vectors");
  add_common(cmd_rbm, rbm, "rbm_likelihood.csv", true);
  CLI::App* cmd_probe = app.add_subcommand(
      "probe-llm", "sense a batch of comments and tabulate the flags");
  add_common(cmd_probe, probe, "probe.csv", true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string subcommand;
  const CommonArgs* args = nullptr;
  if (cmd_herding->parsed()) {
    subcommand = "simulate-herding";
    args = &herding;
  } else if (cmd_threshold->parsed()) {
    subcommand = "simulate-threshold";
    args = &threshold;
  } else if (cmd_oracle->parsed()) {
    subcommand = "solve-oracle";
    args = &oracle;
  } else if (cmd_structure->parsed()) {
    subcommand = "check-structure";
    args = &structure;
  } else if (cmd_rbm->parsed()) {
    subcommand = "train-rbm";
    args = &rbm;
  } else {
    subcommand = "probe-llm";
    args = &probe;
  }

  nlohmann::json config;
  herd::SensorMode sensor = herd::SensorMode::synthetic;
  try {
    config = load_config(*args, subcommand);
    sensor = herd::parse_sensor_mode(args->sensor);
  } catch (const herd::Error& e) {
    std::cerr << "herdlab: " << e.what() << "\n";
    return 2;
  }

  try {
    if (subcommand == "simulate-herding") {
      emit(herd::run_herding_experiment(config), args->out);
    } else if (subcommand == "simulate-threshold") {
      emit(herd::run_threshold_experiment(config), args->out);
    } else if (subcommand == "solve-oracle") {
      emit(herd::run_solve_oracle(config), args->out);
    } else if (subcommand == "check-structure") {
      emit(herd::run_structure_check(config), args->out);
    } else if (subcommand == "train-rbm") {
      emit(herd::run_train_rbm(config, sensor), args->out);
    } else {
      emit(herd::run_probe_llm(config, sensor), args->out);
    }
  } catch (const herd::Error& e) {
    std::cerr << "herdlab: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "herdlab: unexpected failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
