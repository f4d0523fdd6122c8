#pragma once
// Language-model sensor: prompt construction, response parsing into six
// boolean content flags, reduction of the flags to a severity index, the
// synthetic stand-in sensor, and the labeled-comment dataset.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "herd/types.hpp"

namespace herd {

// Severity order of the flags; the reduced observation is the largest set
// index. Index 0 is the benign flag.
inline constexpr std::array<const char*, 6> kFlagKeys = {
    "is_respectful",     "is_insulting",       "is_dehumanizing",
    "is_humiliating",    "promotes_violence",  "promotes_genocide",
};

struct SensorReport {
  std::array<bool, 6> flags{};  // indexed by severity order (kFlagKeys)
  Index reduced = 0;
  std::string raw_response;
};

struct CommentRecord {
  std::string text;
  bool is_hate = false;
  int intensity = 0;  // 1..5 when is_hate, 0 otherwise
};

struct SyntheticUser {
  Index user_type = 0;  // 0 benign, i >= 1 hate intensity i
  std::vector<CommentRecord> comments;
};

// The instruction template with a {comment} slot, byte-stable.
const std::string& prompt_template();

// Template with the comment spliced into the slot, verbatim (braces in
// the comment are not reinterpreted).
std::string build_prompt(const std::string& comment);

// Extracts the first balanced {...} block, reads the six flags (booleans
// in any common casing, bare or quoted), and reduces them. Throws
// NoJsonFound / MissingField / NonBooleanValue.
SensorReport parse_response(const std::string& raw);

// Largest set severity index; all-clear reports 0.
Index reduce_observation(const std::array<bool, 6>& flags);

std::string serialize_report(const SensorReport& report);
SensorReport deserialize_report(const std::string& json);

// Draws the observation index directly from the ground-truth model row.
Index sense_synthetic(Index true_state, const ObservationModel& model,
                      std::mt19937_64& rng);

struct DatasetColumns {
  std::string text = "text";
  std::string label = "hatespeech";       // truthy => hateful
  std::string score = "hate_speech_score";
};

// Four ascending cut points splitting the hate-score range into the five
// intensity bins; scores on a boundary take the lower bin.
struct IntensityBins {
  std::array<double, 4> cuts{};
};

// RFC-4180-style CSV (quoted fields, embedded commas/newlines). Bins
// default to equal quintiles of the observed hate-score range.
std::vector<CommentRecord> load_dataset(
    const std::string& path, const DatasetColumns& columns = {},
    std::optional<IntensityBins> bins = std::nullopt);

void save_dataset(const std::string& path,
                  const std::vector<CommentRecord>& records);

// Samples T comments of the requested class without replacement.
SyntheticUser make_synthetic_user(Index user_type,
                                  const std::vector<CommentRecord>& dataset,
                                  int T, std::mt19937_64& rng);

}  // namespace herd
