#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elicit {

// Root of every error raised by this library. Subclasses map onto the CLI's
// exit-code classes (see tools/elicit.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A StructuredProfile invariant was violated (empty/duplicate tag, empty content).
class ProfileError : public Error {
 public:
  using Error::Error;
};

// An answer addressed a tag that is already present with different content.
class InconsistentAnswerError : public Error {
 public:
  using Error::Error;
};

// Backend output (oracle or LLM) failed a structural validator.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Structured LLM output could not be parsed, even after repair. Keeps the raw
// text for inspection.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

// Base for failures talking to an LLM endpoint.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Connection-level failure or retryable status that persisted through all retries.
class TransportError : public BackendError {
 public:
  TransportError(const std::string& what, int attempts, int last_status)
      : BackendError(what), attempts_(attempts), last_status_(last_status) {}
  int attempts() const noexcept { return attempts_; }
  // 0 when no HTTP response was received.
  int last_status() const noexcept { return last_status_; }

 private:
  int attempts_;
  int last_status_;
};

// Non-retryable HTTP status (4xx other than 429).
class HttpStatusError : public BackendError {
 public:
  HttpStatusError(const std::string& what, int status, std::string body)
      : BackendError(what), status_(status), body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class TimeoutError : public BackendError {
 public:
  TimeoutError(const std::string& what, int attempts)
      : BackendError(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

// A Questioner or simulator policy failed inside a session.
class PolicyError : public Error {
 public:
  PolicyError(const std::string& what, std::size_t turn)
      : Error(what), turn_(turn) {}
  std::size_t turn() const noexcept { return turn_; }

 private:
  std::size_t turn_;
};

// Error from one stage of the forward pipeline, labelled with that stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace elicit
