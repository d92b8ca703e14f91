#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>
#include <string_view>

namespace elicit {

struct BackendConfig {
  // Full URL of an OpenAI-style chat-completions endpoint, e.g.
  // http://localhost:8080/v1/chat/completions
  std::string endpoint_url;
  std::string model_name;
  std::chrono::milliseconds request_timeout{30000};
  int max_retries = 2;
  double temperature = 0.0;
  std::string prompt_template_id;
  // Empty means: read ELICIT_API_KEY from the environment.
  std::string api_key;
  // Delay before retry k (1-based) is backoff_base * 2^(k-1), capped at backoff_cap.
  std::chrono::milliseconds backoff_base{250};
  std::chrono::milliseconds backoff_cap{8000};
  std::size_t max_in_flight = 4;

  // Throws ConfigError when an invariant fails.
  void validate() const;
};

// Sends one completion request and returns the raw completion text.
//
// Transport errors, timeouts, 5xx and 429 responses are retried up to
// cfg.max_retries times with exponential backoff; other 4xx responses are not.
// Throws HttpStatusError (4xx or other non-success status), TimeoutError (the
// final attempt timed out) or TransportError (retries exhausted otherwise).
std::string llm_complete(std::string_view prompt, const BackendConfig& cfg);

// Delay before the given retry (1-based).
std::chrono::milliseconds backoff_delay(const BackendConfig& cfg, int retry);

// Shared handle over one endpoint; bounds concurrent in-flight requests to
// cfg.max_in_flight. Safe to call from many threads.
class LlmClient {
 public:
  explicit LlmClient(BackendConfig cfg);

  LlmClient(const LlmClient&) = delete;
  LlmClient& operator=(const LlmClient&) = delete;

  std::string complete(std::string_view prompt) const;
  const BackendConfig& config() const noexcept { return cfg_; }

 private:
  BackendConfig cfg_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::size_t in_flight_ = 0;
};

}  // namespace elicit
