#include "herd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include "herd/belief.hpp"
#include "herd/cascade.hpp"
#include "herd/errors.hpp"
#include "herd/io.hpp"
#include "herd/presets.hpp"
#include "herd/rbm.hpp"
#include "herd/rng.hpp"
#include "herd/sensing.hpp"
#include "herd/sensor_client.hpp"
#include "herd/stopping.hpp"
#include "herd/structure.hpp"

namespace herd {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

std::string fmt(Index v) { return std::to_string(static_cast<long long>(v)); }

std::string csv_cell(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<double> arange(double lo, double hi, double step,
                           const std::string& what) {
  if (step <= 0.0 || hi < lo) {
    throw Error("config: " + what + " range needs step > 0 and max >= min");
  }
  std::vector<double> values;
  for (double v = lo; v <= hi + 1e-12; v += step) {
    values.push_back(std::min(v, hi));
  }
  return values;
}

std::vector<double> grid_from(const json& config, const std::string& prefix,
                              double fallback_lo, double fallback_hi,
                              double fallback_step) {
  const auto& explicit_grid = config.at(prefix + "_grid");
  if (!explicit_grid.empty()) {
    return explicit_grid.get<std::vector<double>>();
  }
  return arange(config.value(prefix + "_min", fallback_lo),
                config.value(prefix + "_max", fallback_hi),
                config.value(prefix + "_step", fallback_step), prefix);
}

void require_unit_interval(const std::vector<double>& grid,
                           const std::string& what, bool open) {
  if (grid.empty()) {
    throw Error("config: " + what + " grid is empty");
  }
  for (double v : grid) {
    const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!ok) {
      throw Error("config: " + what + " value " + fmt(v) +
                  " outside the unit interval");
    }
  }
}

std::string provenance_line(const json& normalized) {
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer),
                "# herdlab v%s config_hash=%016llx seed=%llu", kVersion,
                static_cast<unsigned long long>(config_hash(normalized)),
                static_cast<unsigned long long>(
                    normalized.value("seed", std::uint64_t{0})));
  return buffer;
}

// --- config schema ---

json sensor_defaults() {
  return json{{"endpoint", "http://localhost:8080"},
              {"path", "/v1/chat/completions"},
              {"model", "mixtral-8x7b-instruct"},
              {"max_tokens", 100},
              {"temperature", 0.7},
              {"top_p", 0.7},
              {"top_k", 50},
              {"repetition_penalty", 50.0},
              {"timeout_ms", 30000},
              {"max_concurrent", 4},
              {"max_retries", 3},
              {"initial_backoff_ms", 250},
              {"backoff_multiplier", 2.0},
              {"api_key_env", "SENSOR_API_KEY"}};
}

json defaults_for(const std::string& subcommand) {
  if (subcommand == "simulate-herding") {
    return json{{"n_states", 6},
                {"decay", 1.3},
                {"observation_csv", ""},
                {"cost_csv", ""},
                {"prior_grid", json::array()},
                {"prior_min", 0.05},
                {"prior_max", 0.95},
                {"prior_step", 0.05},
                {"true_states", json::array()},
                {"n_runs", 100},
                {"horizon", 100},
                {"seed", 0},
                {"residual", "true_state"}};
  }
  if (subcommand == "simulate-threshold") {
    return json{{"gamma_grid", json::array()},
                {"gamma_min", 0.0},
                {"gamma_max", 1.0},
                {"gamma_step", 0.05},
                {"prior_grid", json::array()},
                {"prior_min", 0.05},
                {"prior_max", 0.95},
                {"prior_step", 0.05},
                {"true_state", 1},
                {"n_runs", 100},
                {"horizon", 100},
                {"seed", 0},
                {"rho", 0.5},
                {"d", 0.1},
                {"delta", 1.0},
                {"target_state", 0},
                {"observation_csv", ""},
                {"cost_csv", ""}};
  }
  if (subcommand == "solve-oracle") {
    return json{{"grid", 1024},       {"rho", 0.5},
                {"d", 0.1},           {"delta", 1.0},
                {"target_state", 0},  {"observation_csv", ""},
                {"cost_csv", ""},     {"tol", 1e-8},
                {"max_sweeps", 100000}, {"seed", 0}};
  }
  if (subcommand == "check-structure") {
    return json{{"observation", "hsp"},  {"cost", "type1"},
                {"n_states", 6},         {"decay", 1.3},
                {"observation_csv", ""}, {"cost_csv", ""},
                {"rho", 0.5},            {"d", 0.1},
                {"delta", 1.0},          {"target_state", 0},
                {"seed", 0}};
  }
  if (subcommand == "train-rbm") {
    return json{{"n_states", 6},
                {"decay", 1.3},
                {"observation_csv", ""},
                {"n_visible", 6},
                {"n_hidden", 4},
                {"epochs", 100},
                {"learning_rate", 0.1},
                {"cd_steps", 1},
                {"n_samples", 1000},
                {"n_gibbs", 10000},
                {"gibbs_iterations", 50},
                {"alpha", -1.0},
                {"dataset_csv", ""},
                {"T", 100},
                {"transcript", ""},
                {"save_rbm_prefix", ""},
                {"seed", 0},
                {"sensor", sensor_defaults()}};
  }
  if (subcommand == "probe-llm") {
    return json{{"comments", json::array()},
                {"dataset_csv", ""},
                {"limit", 10},
                {"true_state", 0},
                {"n_states", 6},
                {"decay", 1.3},
                {"observation_csv", ""},
                {"transcript", ""},
                {"seed", 0},
                {"sensor", sensor_defaults()}};
  }
  throw Error("unknown subcommand: " + subcommand);
}

void merge_checked(json& defaults, const json& user,
                   const std::string& where) {
  if (!user.is_object()) {
    throw Error("config: " + where + " must be a JSON object");
  }
  for (const auto& [key, value] : user.items()) {
    if (!defaults.contains(key)) {
      throw Error("config: unknown key '" + where + key + "'");
    }
    json& slot = defaults[key];
    if (slot.is_object()) {
      merge_checked(slot, value, where + key + ".");
      continue;
    }
    const bool both_numbers = slot.is_number() && value.is_number();
    if (!both_numbers && slot.type() != value.type()) {
      throw Error("config: key '" + where + key + "' has the wrong type");
    }
    slot = value;
  }
}

void require_positive(const json& config, const char* key) {
  if (config.at(key).get<double>() <= 0.0) {
    throw Error(std::string("config: '") + key + "' must be positive");
  }
}

// --- model/cost selection ---

ObservationModel pick_observation(const json& config) {
  const std::string csv = config.value("observation_csv", "");
  if (!csv.empty()) {
    return ObservationModel(load_matrix_csv(csv));
  }
  if (config.value("observation", "") == "hsp" || !config.contains("n_states")) {
    return hsp_observation_model();
  }
  return severity_observation_model(config.at("n_states").get<Index>(),
                                    config.at("decay").get<double>());
}

CostModel pick_cost(const json& config, Index n_states) {
  const std::string csv = config.value("cost_csv", "");
  if (!csv.empty()) {
    return CostModel(load_matrix_csv(csv));
  }
  if (config.value("cost", "") == "type1" || !config.contains("n_states")) {
    return type1_error_cost();
  }
  (void)n_states;
  return intensity_misclassification_cost(config.at("n_states").get<Index>());
}

StoppingCostParams stopping_params_from(const json& config) {
  StoppingCostParams params;
  params.rho = config.at("rho").get<double>();
  params.d = config.at("d").get<double>();
  params.delta = config.at("delta").get<double>();
  params.target_state = config.at("target_state").get<Index>();
  return params;
}

SensorConfig sensor_config_from(const json& s) {
  SensorConfig c;
  c.endpoint = s.at("endpoint").get<std::string>();
  c.path = s.at("path").get<std::string>();
  c.model = s.at("model").get<std::string>();
  c.max_tokens = s.at("max_tokens").get<int>();
  c.temperature = s.at("temperature").get<double>();
  c.top_p = s.at("top_p").get<double>();
  c.top_k = s.at("top_k").get<int>();
  c.repetition_penalty = s.at("repetition_penalty").get<double>();
  c.timeout = std::chrono::milliseconds(s.at("timeout_ms").get<long long>());
  c.max_concurrent = s.at("max_concurrent").get<int>();
  c.retry.max_retries = s.at("max_retries").get<int>();
  c.retry.initial_backoff =
      std::chrono::milliseconds(s.at("initial_backoff_ms").get<long long>());
  c.retry.multiplier = s.at("backoff_multiplier").get<double>();
  c.api_key_env = s.at("api_key_env").get<std::string>();
  return c;
}

// Sensor that yields one flag row per comment, by mode.
struct FlagSource {
  SensorMode mode;
  const json* config = nullptr;
  std::shared_ptr<TranscriptCache> cache;
  std::shared_ptr<SensorClient> client;
  std::optional<ObservationModel> truth;  // synthetic only

  std::array<bool, 6> flags_for(const std::string& comment, Index true_state,
                                std::mt19937_64& rng) const {
    std::array<bool, 6> flags{};
    if (mode == SensorMode::synthetic) {
      const Index y = sense_synthetic(true_state, *truth, rng);
      flags[static_cast<std::size_t>(y)] = true;
      (void)comment;
      return flags;
    }
    SensorReport report;
    if (mode == SensorMode::cached) {
      report = CachedSensor(cache, client).sense(comment);
    } else {
      report = client ? client->sense(comment)
                      : throw Error("probe: remote sensor not configured");
    }
    return report.flags;
  }
};

FlagSource make_flag_source(const json& config, SensorMode mode) {
  FlagSource source;
  source.mode = mode;
  source.config = &config;
  if (mode == SensorMode::synthetic) {
    source.truth = pick_observation(config);
    return source;
  }
  if (mode == SensorMode::cached) {
    const std::string transcript = config.value("transcript", "");
    if (transcript.empty()) {
      throw Error("config: cached sensor mode needs 'transcript'");
    }
    source.cache = std::make_shared<TranscriptCache>(transcript);
    return source;
  }
  source.client =
      std::make_shared<SensorClient>(sensor_config_from(config.at("sensor")));
  const std::string transcript = config.value("transcript", "");
  if (!transcript.empty()) {
    source.cache = std::make_shared<TranscriptCache>(transcript);
  }
  return source;
}

}  // namespace

SensorMode parse_sensor_mode(const std::string& name) {
  if (name == "synthetic") return SensorMode::synthetic;
  if (name == "remote") return SensorMode::remote;
  if (name == "cached") return SensorMode::cached;
  throw Error("unknown sensor mode: " + name);
}

std::string table_to_csv(const ResultTable& table) {
  std::string out;
  if (!table.provenance.empty()) {
    out += table.provenance;
    out += '\n';
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += csv_cell(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw DimensionMismatch("result table is ragged");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += csv_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw EmptyData("write_csv: cannot open " + path);
  }
  out << table_to_csv(table);
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string canonical = config.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

nlohmann::json normalize_config(const std::string& subcommand,
                                nlohmann::json config) {
  json normalized = defaults_for(subcommand);
  if (config.is_null()) config = json::object();
  try {
    merge_checked(normalized, config, "");

    if (subcommand == "simulate-herding" ||
        subcommand == "simulate-threshold") {
      require_positive(normalized, "n_runs");
      require_positive(normalized, "horizon");
    }
    if (normalized.contains("rho")) {
      const double rho = normalized.at("rho").get<double>();
      if (rho < 0.0 || rho >= 1.0) {
        throw Error("config: 'rho' must lie in [0, 1)");
      }
    }
    if (subcommand == "simulate-herding") {
      const std::string residual = normalized.at("residual").get<std::string>();
      if (residual != "true_state" && residual != "uniform") {
        throw Error("config: 'residual' must be true_state or uniform");
      }
      require_positive(normalized, "n_states");
    }
    if (subcommand == "solve-oracle") {
      if (normalized.at("grid").get<int>() < 16) {
        throw Error("config: 'grid' must be at least 16");
      }
      require_positive(normalized, "tol");
      require_positive(normalized, "max_sweeps");
    }
    if (subcommand == "check-structure") {
      const std::string obs = normalized.at("observation").get<std::string>();
      if (obs != "hsp" && obs != "severity") {
        throw Error("config: 'observation' must be hsp or severity");
      }
      const std::string cost = normalized.at("cost").get<std::string>();
      if (cost != "type1" && cost != "intensity") {
        throw Error("config: 'cost' must be type1 or intensity");
      }
    }
    if (subcommand == "train-rbm") {
      require_positive(normalized, "n_visible");
      require_positive(normalized, "n_hidden");
      require_positive(normalized, "epochs");
      require_positive(normalized, "learning_rate");
      require_positive(normalized, "cd_steps");
      require_positive(normalized, "n_samples");
      require_positive(normalized, "n_gibbs");
      require_positive(normalized, "gibbs_iterations");
    }
    if (subcommand == "probe-llm") {
      require_positive(normalized, "limit");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return normalized;
}

ResultTable run_herding_experiment(const nlohmann::json& raw) {
  const json config = normalize_config("simulate-herding", raw);
  const ObservationModel model = pick_observation(config);
  const CostModel cost = pick_cost(config, model.states());
  require_same_states(model, cost);

  HerdingSweepConfig sweep;
  sweep.prior_grid = grid_from(config, "prior", 0.05, 0.95, 0.05);
  require_unit_interval(sweep.prior_grid, "prior", /*open=*/true);
  if (!config.at("true_states").empty()) {
    sweep.true_states = config.at("true_states").get<std::vector<Index>>();
    for (Index s : sweep.true_states) {
      if (s < 0 || s >= model.states()) {
        throw Error("config: true state " + fmt(s) + " out of range");
      }
    }
  } else {
    for (Index s = 0; s < model.states(); ++s) sweep.true_states.push_back(s);
  }
  sweep.n_runs = config.at("n_runs").get<int>();
  sweep.horizon = config.at("horizon").get<int>();
  sweep.master_seed = config.at("seed").get<std::uint64_t>();
  sweep.residual = config.at("residual").get<std::string>() == "uniform"
                       ? ResidualAllocation::uniform
                       : ResidualAllocation::true_state;

  const std::vector<HerdingCell> cells =
      monte_carlo_herding(sweep, model, cost);

  ResultTable table;
  table.provenance = provenance_line(config);
  table.columns = {"true_state", "prior_p0", "mean_action", "cascade_freq",
                   "mean_cascade_time"};
  for (const auto& cell : cells) {
    table.rows.push_back({fmt(cell.true_state), fmt(cell.prior_p0),
                          fmt(cell.mean_action), fmt(cell.cascade_freq),
                          fmt(cell.mean_cascade_time)});
  }
  return table;
}

ResultTable run_threshold_experiment(const nlohmann::json& raw) {
  const json config = normalize_config("simulate-threshold", raw);
  const ObservationModel model = pick_observation(config);
  const CostModel cost = pick_cost(config, model.states());
  require_same_states(model, cost);
  const StoppingCostParams params = stopping_params_from(config);
  if (model.states() != 2) {
    throw Error("config: the threshold sweep runs on a two-state model");
  }

  const std::vector<double> gamma_grid = grid_from(config, "gamma", 0.0, 1.0,
                                                   0.05);
  require_unit_interval(gamma_grid, "gamma", /*open=*/false);
  const std::vector<double> prior_grid =
      grid_from(config, "prior", 0.05, 0.95, 0.05);
  require_unit_interval(prior_grid, "prior", /*open=*/true);

  const Index true_state = config.at("true_state").get<Index>();
  if (true_state < 0 || true_state >= model.states()) {
    throw Error("config: 'true_state' out of range");
  }
  const int n_runs = config.at("n_runs").get<int>();
  const int horizon = config.at("horizon").get<int>();
  const std::uint64_t master = config.at("seed").get<std::uint64_t>();

  ResultTable table;
  table.provenance = provenance_line(config);
  table.columns = {"gamma", "prior_p0", "pct_not_flagged", "mean_tau",
                   "mean_cost"};
  for (double gamma : gamma_grid) {
    const ThresholdPolicy policy{gamma};
    for (std::size_t p = 0; p < prior_grid.size(); ++p) {
      Vector prior(2);
      prior << prior_grid[p], 1.0 - prior_grid[p];
      const Belief initial(prior);

      long long not_flagged = 0;
      long long steps = 0;
      double tau_sum = 0.0;
      int tau_count = 0;
      double cost_sum = 0.0;
      for (int run = 0; run < n_runs; ++run) {
        // Seeds skip the gamma index on purpose: common random numbers
        // couple the threshold sweep, so the delay curves are exactly
        // monotone instead of monotone-up-to-noise.
        std::mt19937_64 engine = rng::make_engine(
            rng::derive_seed(master, p, static_cast<std::uint64_t>(run)));
        const EpisodeResult episode =
            simulate_stopping_run(initial, true_state, policy, model, cost,
                                  params, horizon, engine);
        for (const auto& [decision, action] : episode.action_log) {
          (void)decision;
          steps += 1;
          if (action == 0) not_flagged += 1;
        }
        if (episode.tau.has_value()) {
          tau_sum += *episode.tau;
          tau_count += 1;
        }
        cost_sum += episode.discounted_cost;
      }
      const double pct =
          100.0 * static_cast<double>(not_flagged) / static_cast<double>(steps);
      const double mean_tau =
          tau_count > 0 ? tau_sum / tau_count
                        : std::numeric_limits<double>::quiet_NaN();
      table.rows.push_back({fmt(gamma), fmt(prior_grid[p]), fmt(pct),
                            fmt(mean_tau), fmt(cost_sum / n_runs)});
    }
  }
  return table;
}

ResultTable run_solve_oracle(const nlohmann::json& raw) {
  const json config = normalize_config("solve-oracle", raw);
  const ObservationModel model = pick_observation(config);
  const CostModel cost = pick_cost(config, model.states());
  require_same_states(model, cost);
  const StoppingCostParams params = stopping_params_from(config);

  const BeliefGridSolution solution = value_iteration_oracle(
      config.at("grid").get<int>(), model, cost, params,
      config.at("tol").get<double>(), config.at("max_sweeps").get<int>());

  ResultTable table;
  table.provenance = provenance_line(config);
  table.columns = {"pi0", "value", "decision"};
  for (Index i = 0; i < solution.grid.size(); ++i) {
    table.rows.push_back(
        {fmt(solution.grid(i)), fmt(solution.value(i)),
         std::to_string(static_cast<int>(solution.decision[i]))});
  }
  return table;
}

nlohmann::json run_structure_check(const nlohmann::json& raw) {
  const json config = normalize_config("check-structure", raw);
  const ObservationModel model = pick_observation(config);
  const CostModel cost = pick_cost(config, model.states());
  require_same_states(model, cost);
  const StoppingCostParams params = stopping_params_from(config);

  const StructureReport report =
      check_structural_assumptions(cost, model, params);
  json out;
  out["s1"] = report.s1;
  out["s2"] = report.s2;
  out["s3"] = report.s3;
  out["s4"] = report.s4;
  out["violations"] = json::array();
  for (const auto& v : report.violations) {
    out["violations"].push_back(json{{"assumption", v.assumption},
                                     {"state", v.state},
                                     {"action", v.action},
                                     {"lhs", v.lhs},
                                     {"rhs", v.rhs}});
  }
  out["provenance"] = json{{"version", kVersion},
                           {"config_hash", config_hash(config)},
                           {"seed", config.at("seed").get<std::uint64_t>()}};
  return out;
}

ResultTable run_train_rbm(const nlohmann::json& raw, SensorMode sensor) {
  const json config = normalize_config("train-rbm", raw);
  const Index n_states = config.at("n_states").get<Index>();
  const int n_visible = config.at("n_visible").get<int>();
  const std::uint64_t master = config.at("seed").get<std::uint64_t>();

  const FlagSource source = make_flag_source(config, sensor);
  if (source.truth.has_value() &&
      source.truth->observations() != n_visible) {
    throw Error("config: observation space must match the visible units");
  }

  // One flag matrix per state.
  std::vector<Matrix> flag_rows;
  if (sensor == SensorMode::synthetic) {
    const int n_samples = config.at("n_samples").get<int>();
    for (Index x = 0; x < n_states; ++x) {
      std::mt19937_64 engine = rng::make_engine(
          rng::derive_seed(master, static_cast<std::uint64_t>(x), 0, 1));
      Matrix rows = Matrix::Zero(n_samples, n_visible);
      for (int r = 0; r < n_samples; ++r) {
        const auto flags = source.flags_for("", x, engine);
        for (int f = 0; f < n_visible; ++f) {
          rows(r, f) = flags[static_cast<std::size_t>(f)] ? 1.0 : 0.0;
        }
      }
      flag_rows.push_back(std::move(rows));
    }
  } else {
    const std::string dataset_csv = config.at("dataset_csv").get<std::string>();
    if (dataset_csv.empty()) {
      throw Error("config: train-rbm with a live sensor needs 'dataset_csv'");
    }
    const std::vector<CommentRecord> records = load_dataset(dataset_csv);
    const int T = config.at("T").get<int>();
    for (Index x = 0; x < n_states; ++x) {
      std::mt19937_64 engine = rng::make_engine(
          rng::derive_seed(master, static_cast<std::uint64_t>(x), 0, 1));
      const SyntheticUser user = make_synthetic_user(x, records, T, engine);
      Matrix rows = Matrix::Zero(T, n_visible);
      for (int r = 0; r < T; ++r) {
        const auto flags =
            source.flags_for(user.comments[static_cast<std::size_t>(r)].text,
                             x, engine);
        for (int f = 0; f < n_visible; ++f) {
          rows(r, f) = flags[static_cast<std::size_t>(f)] ? 1.0 : 0.0;
        }
      }
      flag_rows.push_back(std::move(rows));
    }
  }

  RbmTrainConfig train;
  train.n_visible = n_visible;
  train.n_hidden = config.at("n_hidden").get<int>();
  train.epochs = config.at("epochs").get<int>();
  train.learning_rate = config.at("learning_rate").get<double>();
  train.cd_steps = config.at("cd_steps").get<int>();

  const int n_gibbs = config.at("n_gibbs").get<int>();
  const int gibbs_iterations = config.at("gibbs_iterations").get<int>();
  const std::string save_prefix = config.at("save_rbm_prefix").get<std::string>();

  std::vector<Matrix> samples_per_state;
  for (Index x = 0; x < n_states; ++x) {
    train.rng_seed =
        rng::derive_seed(master, static_cast<std::uint64_t>(x), 1, 2);
    const RbmParams params = train_cd(flag_rows[static_cast<std::size_t>(x)],
                                      train);
    if (!save_prefix.empty()) {
      save_rbm_json(save_prefix + std::to_string(x) + ".json", params);
    }
    std::mt19937_64 engine = rng::make_engine(
        rng::derive_seed(master, static_cast<std::uint64_t>(x), 2, 3));
    samples_per_state.push_back(
        gibbs_sample(params, n_gibbs, gibbs_iterations, engine));
  }

  const auto reducer = [](const Eigen::RowVectorXd& row) {
    std::array<bool, 6> flags{};
    for (Index i = 0; i < row.size() && i < 6; ++i) {
      flags[static_cast<std::size_t>(i)] = row(i) > 0.5;
    }
    return reduce_observation(flags);
  };
  const ObservationModel estimated = estimate_likelihood(
      samples_per_state, reducer, n_visible, config.at("alpha").get<double>());

  ResultTable table;
  table.provenance = provenance_line(config);
  table.columns = {"state"};
  for (Index y = 0; y < estimated.observations(); ++y) {
    table.columns.push_back("p" + std::to_string(y));
  }
  for (Index x = 0; x < estimated.states(); ++x) {
    std::vector<std::string> row{fmt(x)};
    for (Index y = 0; y < estimated.observations(); ++y) {
      row.push_back(fmt(estimated(x, y)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable run_probe_llm(const nlohmann::json& raw, SensorMode sensor) {
  const json config = normalize_config("probe-llm", raw);

  std::vector<std::string> comments =
      config.at("comments").get<std::vector<std::string>>();
  if (comments.empty()) {
    const std::string dataset_csv = config.at("dataset_csv").get<std::string>();
    if (dataset_csv.empty()) {
      throw Error("config: probe-llm needs 'comments' or 'dataset_csv'");
    }
    const std::vector<CommentRecord> records = load_dataset(dataset_csv);
    const std::size_t limit =
        static_cast<std::size_t>(config.at("limit").get<int>());
    for (std::size_t i = 0; i < records.size() && i < limit; ++i) {
      comments.push_back(records[i].text);
    }
  }
  if (comments.empty()) {
    throw Error("config: probe-llm has no comments to probe");
  }

  const FlagSource source = make_flag_source(config, sensor);
  const Index true_state = config.at("true_state").get<Index>();
  std::mt19937_64 engine = rng::make_engine(
      rng::derive_seed(config.at("seed").get<std::uint64_t>(), 0, 0, 4));

  ResultTable table;
  table.provenance = provenance_line(config);
  table.columns = {"comment", "reduced"};
  for (const char* key : kFlagKeys) table.columns.push_back(key);
  for (const std::string& comment : comments) {
    const auto flags = source.flags_for(comment, true_state, engine);
    std::vector<std::string> row{comment,
                                 fmt(reduce_observation(flags))};
    for (bool flag : flags) row.push_back(flag ? "1" : "0");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace herd
