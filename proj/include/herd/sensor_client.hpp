#pragma once
// Remote sensor plumbing: a chat-completions client with bounded
// concurrency, retry with exponential backoff, and an append-only
// transcript cache for offline replay.

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "herd/sensing.hpp"

namespace herd {

struct RetryPolicy {
  int max_retries = 3;  // attempts beyond the first
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

struct SensorConfig {
  std::string endpoint = "http://localhost:8080";
  std::string path = "/v1/chat/completions";
  std::string model = "mixtral-8x7b-instruct";
  int max_tokens = 100;
  double temperature = 0.7;
  double top_p = 0.7;
  int top_k = 50;
  double repetition_penalty = 50.0;
  std::chrono::milliseconds timeout{30000};
  int max_concurrent = 4;
  RetryPolicy retry;
  // Name of the environment variable holding the bearer token. The token
  // itself never appears in configs or code.
  std::string api_key_env = "SENSOR_API_KEY";
};

// Append-only JSONL of (comment hash, report) pairs. Loading tolerates a
// missing file; appends flush per line.
class TranscriptCache {
 public:
  explicit TranscriptCache(std::string path);

  std::optional<SensorReport> lookup(const std::string& comment) const;
  void append(const std::string& comment, const SensorReport& report);
  std::size_t size() const;

  static std::string key_of(const std::string& comment);

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, SensorReport> entries_;
};

class SensorClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit SensorClient(SensorConfig config, Sleeper sleeper = {});

  // Prompt -> POST -> parse. Retries transport errors, 429/5xx, and
  // unparseable bodies with exponential backoff; at most
  // `max_concurrent` requests are in flight across threads.
  SensorReport sense(const std::string& comment);

  const SensorConfig& config() const { return config_; }

 private:
  SensorConfig config_;
  Sleeper sleeper_;
  std::string bearer_token_;
  struct Gate;
  std::shared_ptr<Gate> gate_;
};

// Cache-first composition: hits replay the stored report; misses go to
// the client when one is attached, otherwise fail.
class CachedSensor {
 public:
  CachedSensor(std::shared_ptr<TranscriptCache> cache,
               std::shared_ptr<SensorClient> client = nullptr);

  SensorReport sense(const std::string& comment);

 private:
  std::shared_ptr<TranscriptCache> cache_;
  std::shared_ptr<SensorClient> client_;
};

}  // namespace herd
