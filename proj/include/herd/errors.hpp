#pragma once
// Typed failure modes raised across the library. Everything derives from
// herd::Error so callers can catch the whole family at the CLI boundary.

#include <stdexcept>
#include <string>

namespace herd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Bayes update asked to condition on an observation with zero probability
// under the prior.
struct ZeroLikelihood : Error {
  using Error::Error;
};

// Social filter asked to condition on an action with zero probability.
struct ImpossibleAction : Error {
  using Error::Error;
};

struct NonConvergence : Error {
  using Error::Error;
};

struct EmptyData : Error {
  using Error::Error;
};

// --- sensing / dataset ---

struct NoJsonFound : Error {
  using Error::Error;
};

struct MissingField : Error {
  explicit MissingField(const std::string& key)
      : Error("missing field: " + key), key(key) {}
  std::string key;
};

struct NonBooleanValue : Error {
  explicit NonBooleanValue(const std::string& key)
      : Error("non-boolean value for field: " + key), key(key) {}
  std::string key;
};

struct MalformedRow : Error {
  MalformedRow(std::size_t line, const std::string& what)
      : Error("malformed row at line " + std::to_string(line) + ": " + what),
        line(line) {}
  std::size_t line;
};

struct MissingColumn : Error {
  explicit MissingColumn(const std::string& name)
      : Error("missing column: " + name), name(name) {}
  std::string name;
};

struct InsufficientData : Error {
  using Error::Error;
};

// --- remote sensor ---

struct TransportError : Error {
  using Error::Error;
};

struct RateLimited : Error {
  using Error::Error;
};

struct ParseFailedAfterRetries : Error {
  using Error::Error;
};

}  // namespace herd
