#pragma once
// Experiment runners behind the CLI subcommands: each takes a validated
// config document, runs deterministically from the seed inside it, and
// produces a provenance-stamped result table (or JSON report).

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "herd/types.hpp"

namespace herd {

inline constexpr const char* kVersion = "0.1.0";

enum class SensorMode { synthetic, remote, cached };

SensorMode parse_sensor_mode(const std::string& name);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string provenance;  // comment line stamped at the top of the CSV
};

std::string table_to_csv(const ResultTable& table);
void write_csv(const ResultTable& table, const std::string& path);

// FNV-1a over the canonical (sorted-key) serialization.
std::uint64_t config_hash(const nlohmann::json& config);

// Fills defaults, validates types/ranges, throws herd::Error with a
// readable message on bad input.
nlohmann::json normalize_config(const std::string& subcommand,
                                nlohmann::json config);

ResultTable run_herding_experiment(const nlohmann::json& config);
ResultTable run_threshold_experiment(const nlohmann::json& config);
ResultTable run_solve_oracle(const nlohmann::json& config);
nlohmann::json run_structure_check(const nlohmann::json& config);
ResultTable run_train_rbm(const nlohmann::json& config, SensorMode sensor);
ResultTable run_probe_llm(const nlohmann::json& config, SensorMode sensor);

}  // namespace herd
