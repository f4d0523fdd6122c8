#include "herd/sensor_client.hpp"

#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "herd/errors.hpp"

namespace herd {

namespace {

nlohmann::json report_to_json(const std::string& key,
                              const SensorReport& report) {
  nlohmann::json line;
  line["key"] = key;
  line["flags"] = report.flags;
  line["reduced"] = report.reduced;
  line["raw"] = report.raw_response;
  return line;
}

SensorReport report_from_json(const nlohmann::json& line) {
  SensorReport report;
  const auto flags = line.at("flags").get<std::vector<bool>>();
  if (flags.size() != report.flags.size()) {
    throw DimensionMismatch("transcript: flag vector must have 6 entries");
  }
  for (std::size_t i = 0; i < flags.size(); ++i) report.flags[i] = flags[i];
  report.reduced = line.at("reduced").get<Index>();
  report.raw_response = line.value("raw", std::string{});
  return report;
}

}  // namespace

// --- TranscriptCache ---

std::string TranscriptCache::key_of(const std::string& comment) {
  // FNV-1a, 64-bit
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : comment) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(h));
  return buffer;
}

TranscriptCache::TranscriptCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // fresh cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(line);
      entries_[parsed.at("key").get<std::string>()] = report_from_json(parsed);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRow(line_no, std::string("transcript: ") + e.what());
    }
  }
}

std::optional<SensorReport> TranscriptCache::lookup(
    const std::string& comment) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = entries_.find(key_of(comment));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void TranscriptCache::append(const std::string& comment,
                             const SensorReport& report) {
  const std::string key = key_of(comment);
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[key] = report;
  std::ofstream out(path_, std::ios::app);
  if (!out) {
    throw EmptyData("transcript: cannot append to " + path_);
  }
  out << report_to_json(key, report).dump() << '\n' << std::flush;
}

std::size_t TranscriptCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

// --- SensorClient ---

struct SensorClient::Gate {
  explicit Gate(int limit) : slots(limit) {}
  std::mutex m;
  std::condition_variable cv;
  int slots;

  void acquire() {
    std::unique_lock<std::mutex> lock(m);
    cv.wait(lock, [&] { return slots > 0; });
    --slots;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(m);
      ++slots;
    }
    cv.notify_one();
  }

  struct Guard {
    explicit Guard(Gate& g) : gate(g) { gate.acquire(); }
    ~Guard() { gate.release(); }
    Gate& gate;
  };
};

SensorClient::SensorClient(SensorConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.max_concurrent < 1 || config_.retry.max_retries < 0) {
    throw DimensionMismatch("sensor: limits must be positive");
  }
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
  // Auth lives in the environment, never in config files.
  const char* token = std::getenv(config_.api_key_env.c_str());
  bearer_token_ = token ? token : "";
  gate_ = std::make_shared<Gate>(config_.max_concurrent);
}

SensorReport SensorClient::sense(const std::string& comment) {
  const std::string prompt = build_prompt(comment);
  nlohmann::json body;
  body["model"] = config_.model;
  body["max_tokens"] = config_.max_tokens;
  body["temperature"] = config_.temperature;
  body["top_p"] = config_.top_p;
  body["top_k"] = config_.top_k;
  body["repetition_penalty"] = config_.repetition_penalty;
  body["messages"] = nlohmann::json::array(
      {nlohmann::json{{"role", "user"}, {"content", prompt}}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!bearer_token_.empty()) {
    headers.emplace("Authorization", "Bearer " + bearer_token_);
  }

  const int attempts = config_.retry.max_retries + 1;
  std::chrono::milliseconds backoff = config_.retry.initial_backoff;
  std::string last_failure = "no attempt made";
  bool parse_failure = false;
  bool rate_limited = false;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      sleeper_(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(backoff.count()) * config_.retry.multiplier));
    }

    httplib::Result result = [&] {
      Gate::Guard in_flight(*gate_);
      httplib::Client http(config_.endpoint);
      http.set_connection_timeout(config_.timeout);
      http.set_read_timeout(config_.timeout);
      http.set_write_timeout(config_.timeout);
      return http.Post(config_.path, headers, payload, "application/json");
    }();

    if (!result) {
      parse_failure = false;
      rate_limited = false;
      last_failure = "transport: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 429) {
      parse_failure = false;
      rate_limited = true;
      last_failure = "rate limited";
      continue;
    }
    if (result->status >= 500) {
      parse_failure = false;
      rate_limited = false;
      last_failure = "server error " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw TransportError("sensor: status " + std::to_string(result->status) +
                           " from " + config_.endpoint + config_.path);
    }

    std::string content;
    try {
      const nlohmann::json reply = nlohmann::json::parse(result->body);
      content = reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
    } catch (const nlohmann::json::exception&) {
      parse_failure = true;
      rate_limited = false;
      last_failure = "reply is not chat-completions shaped";
      continue;
    }
    try {
      return parse_response(content);
    } catch (const Error& e) {
      parse_failure = true;
      rate_limited = false;
      last_failure = std::string("unparseable content: ") + e.what();
      continue;
    }
  }

  if (parse_failure) {
    throw ParseFailedAfterRetries("sensor: " + last_failure + " after " +
                                  std::to_string(attempts) + " attempts");
  }
  if (rate_limited) {
    throw RateLimited("sensor: still rate limited after " +
                      std::to_string(attempts) + " attempts");
  }
  throw TransportError("sensor: " + last_failure + " after " +
                       std::to_string(attempts) + " attempts");
}

// --- CachedSensor ---

CachedSensor::CachedSensor(std::shared_ptr<TranscriptCache> cache,
                           std::shared_ptr<SensorClient> client)
    : cache_(std::move(cache)), client_(std::move(client)) {
  if (!cache_) {
    throw EmptyData("cached sensor: cache is required");
  }
}

SensorReport CachedSensor::sense(const std::string& comment) {
  if (auto hit = cache_->lookup(comment)) {
    return *hit;
  }
  if (!client_) {
    throw EmptyData("cached sensor: transcript miss and no client attached");
  }
  SensorReport report = client_->sense(comment);
  cache_->append(comment, report);
  return report;
}

}  // namespace herd
