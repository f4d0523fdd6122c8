#include "herd/sensing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "herd/errors.hpp"

namespace herd {

namespace {

// Byte-identical to data/prompt_template.txt (the stored golden copy).
// Spacing is deliberately uneven: only the first key has one after ':'.
constexpr const char* kPromptTemplate =
    R"tpl([INST]
Return a JSON with the following format for the given text:
{'is_insulting': Bool,
'is_dehumanizing':Bool,
'is_humiliating':Bool,
'promotes_violence':Bool,
'promotes_genocide':Bool,
'is_respectful':Bool}
Text: {comment}[/INST])tpl";

constexpr const char* kCommentSlot = "{comment}";

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// First balanced {...} block; quote-aware so braces inside strings don't
// move the depth counter.
std::string first_json_block(const std::string& raw) {
  const std::size_t start = raw.find('{');
  if (start == std::string::npos) {
    throw NoJsonFound("no '{' in sensor response");
  }
  int depth = 0;
  char quote = '\0';
  for (std::size_t i = start; i < raw.size(); ++i) {
    const char c = raw[i];
    if (quote != '\0') {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = '\0';
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) {
        return raw.substr(start, i - start + 1);
      }
    }
  }
  throw NoJsonFound("unbalanced '{' in sensor response");
}

// Value of `key` inside the block: the token after the first
// key-occurrence that is actually followed by ':'.
bool flag_value(const std::string& block, const std::string& key) {
  std::size_t pos = 0;
  while ((pos = block.find(key, pos)) != std::string::npos) {
    std::size_t i = pos + key.size();
    if (i < block.size() && (block[i] == '"' || block[i] == '\'')) ++i;
    while (i < block.size() && is_space(block[i])) ++i;
    if (i >= block.size() || block[i] != ':') {
      pos += key.size();
      continue;
    }
    ++i;
    while (i < block.size() && is_space(block[i])) ++i;
    std::size_t end = i;
    if (end < block.size() && (block[end] == '"' || block[end] == '\'')) {
      const char q = block[end];
      ++i;
      end = block.find(q, i);
      if (end == std::string::npos) throw NonBooleanValue(key);
    } else {
      while (end < block.size() && block[end] != ',' && block[end] != '}' &&
             !is_space(block[end])) {
        ++end;
      }
    }
    const std::string token = to_lower(block.substr(i, end - i));
    if (token == "true") return true;
    if (token == "false") return false;
    throw NonBooleanValue(key);
  }
  throw MissingField(key);
}

// --- RFC-4180 reader ---

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line the record starts on
};

std::vector<CsvRecord> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EmptyData("load_dataset: cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRecord record;
    record.line = line;
    bool done = false;
    while (!done) {
      std::string field;
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) {
            throw MalformedRow(record.line, "unterminated quoted field");
          }
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              break;
            }
          } else {
            if (text[i] == '\n') ++line;
            field.push_back(text[i]);
            ++i;
          }
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' &&
               text[i] != '\r') {
          field.push_back(text[i]);
          ++i;
        }
      }
      record.fields.push_back(std::move(field));
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else if (text[i] == '\r' || text[i] == '\n') {
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        ++i;
        ++line;
        done = true;
      } else {
        throw MalformedRow(record.line, "stray character after quoted field");
      }
    }
    // ignore a trailing blank line
    if (record.fields.size() == 1 && record.fields[0].empty() &&
        i >= text.size()) {
      break;
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw MissingColumn(name);
}

bool parse_label(const std::string& cell, std::size_t line) {
  const std::string low = to_lower(cell);
  if (low == "true") return true;
  if (low == "false") return false;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v != 0.0;
  } catch (const std::exception&) {
  }
  throw MalformedRow(line, "label is not truthy/falsy: '" + cell + "'");
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

const std::string& prompt_template() {
  static const std::string tpl = kPromptTemplate;
  return tpl;
}

std::string build_prompt(const std::string& comment) {
  if (comment.empty()) {
    throw EmptyData("build_prompt: empty comment");
  }
  const std::string& tpl = prompt_template();
  const std::size_t slot = tpl.find(kCommentSlot);
  std::string prompt = tpl;
  prompt.replace(slot, std::string(kCommentSlot).size(), comment);
  return prompt;
}

SensorReport parse_response(const std::string& raw) {
  const std::string block = first_json_block(raw);
  SensorReport report;
  for (std::size_t i = 0; i < kFlagKeys.size(); ++i) {
    report.flags[i] = flag_value(block, kFlagKeys[i]);
  }
  report.reduced = reduce_observation(report.flags);
  report.raw_response = raw;
  return report;
}

Index reduce_observation(const std::array<bool, 6>& flags) {
  Index reduced = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) reduced = static_cast<Index>(i);
  }
  return reduced;
}

std::string serialize_report(const SensorReport& report) {
  // Template key order, double-quoted, lowercase booleans.
  static constexpr std::array<std::size_t, 6> order = {1, 2, 3, 4, 5, 0};
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0) out << ", ";
    out << '"' << kFlagKeys[order[k]]
        << "\": " << (report.flags[order[k]] ? "true" : "false");
  }
  out << '}';
  return out.str();
}

SensorReport deserialize_report(const std::string& json) {
  return parse_response(json);
}

Index sense_synthetic(Index true_state, const ObservationModel& model,
                      std::mt19937_64& rng) {
  if (true_state < 0 || true_state >= model.states()) {
    throw DimensionMismatch("sense_synthetic: state out of range");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double draw = unit(rng);
  double cumulative = 0.0;
  for (Index y = 0; y < model.observations(); ++y) {
    cumulative += model(true_state, y);
    if (draw < cumulative) return y;
  }
  return model.observations() - 1;
}

std::vector<CommentRecord> load_dataset(const std::string& path,
                                        const DatasetColumns& columns,
                                        std::optional<IntensityBins> bins) {
  const std::vector<CsvRecord> rows = parse_csv(path);
  if (rows.empty()) {
    throw EmptyData("load_dataset: " + path + " has no header");
  }
  const auto& header = rows.front().fields;
  const std::size_t text_col = column_index(header, columns.text);
  const std::size_t label_col = column_index(header, columns.label);
  const std::size_t score_col = column_index(header, columns.score);

  struct Raw {
    CommentRecord record;
    double score = 0.0;
  };
  std::vector<Raw> parsed;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t need =
        std::max(text_col, std::max(label_col, score_col)) + 1;
    if (row.fields.size() < need) {
      throw MalformedRow(row.line, "expected at least " +
                                       std::to_string(need) + " fields, got " +
                                       std::to_string(row.fields.size()));
    }
    Raw raw;
    raw.record.text = row.fields[text_col];
    if (raw.record.text.empty()) {
      throw MalformedRow(row.line, "missing text");
    }
    raw.record.is_hate = parse_label(row.fields[label_col], row.line);
    if (raw.record.is_hate) {
      const std::string& cell = row.fields[score_col];
      try {
        std::size_t used = 0;
        raw.score = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw MalformedRow(row.line, "score is not numeric: '" + cell + "'");
      }
      lo = std::min(lo, raw.score);
      hi = std::max(hi, raw.score);
    }
    parsed.push_back(std::move(raw));
  }

  IntensityBins cut_points;
  if (bins.has_value()) {
    cut_points = *bins;
    for (std::size_t i = 1; i < cut_points.cuts.size(); ++i) {
      if (cut_points.cuts[i] < cut_points.cuts[i - 1]) {
        throw DimensionMismatch("load_dataset: cut points must be ascending");
      }
    }
  } else if (std::isfinite(lo)) {
    // Equal fifths of the observed hate-score range.
    for (std::size_t i = 0; i < 4; ++i) {
      cut_points.cuts[i] = lo + (hi - lo) * static_cast<double>(i + 1) / 5.0;
    }
  }

  std::vector<CommentRecord> records;
  records.reserve(parsed.size());
  for (auto& raw : parsed) {
    if (raw.record.is_hate) {
      int bin = 1;
      while (bin <= 4 && raw.score > cut_points.cuts[bin - 1]) ++bin;
      raw.record.intensity = bin;
    } else {
      raw.record.intensity = 0;
    }
    records.push_back(std::move(raw.record));
  }
  return records;
}

void save_dataset(const std::string& path,
                  const std::vector<CommentRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw EmptyData("save_dataset: cannot open " + path);
  }
  // Round-trips through load_dataset with cut points {1,2,3,4}: the score
  // column carries the intensity directly.
  out << "text,hatespeech,hate_speech_score\n";
  for (const auto& record : records) {
    out << csv_escape(record.text) << ',' << (record.is_hate ? 1 : 0) << ','
        << record.intensity << '\n';
  }
}

SyntheticUser make_synthetic_user(Index user_type,
                                  const std::vector<CommentRecord>& dataset,
                                  int T, std::mt19937_64& rng) {
  if (user_type < 0 || user_type > 5) {
    throw DimensionMismatch("make_synthetic_user: user_type must be 0..5");
  }
  if (T < 1) {
    throw DimensionMismatch("make_synthetic_user: T must be positive");
  }
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const bool match = user_type == 0
                           ? !dataset[i].is_hate
                           : dataset[i].is_hate &&
                                 dataset[i].intensity ==
                                     static_cast<int>(user_type);
    if (match) pool.push_back(i);
  }
  if (pool.size() < static_cast<std::size_t>(T)) {
    throw InsufficientData(
        "make_synthetic_user: class " + std::to_string(user_type) + " has " +
        std::to_string(pool.size()) + " comments, need " + std::to_string(T));
  }
  // Partial Fisher-Yates: first T entries are a uniform sample without
  // replacement.
  for (int k = 0; k < T; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
  }
  SyntheticUser user;
  user.user_type = user_type;
  user.comments.reserve(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) {
    user.comments.push_back(dataset[pool[static_cast<std::size_t>(k)]]);
  }
  return user;
}

}  // namespace herd
