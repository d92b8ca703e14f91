#include "elicit/llm_client.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "elicit/errors.hpp"

namespace elicit {
namespace {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint_url '" + url + "' has no scheme");
  }
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("endpoint_url scheme must be http or https, got '" + scheme + "'");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("https endpoints need a build with OpenSSL");
#endif
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string api_key(const BackendConfig& cfg) {
  if (!cfg.api_key.empty()) return cfg.api_key;
  const char* env = std::getenv("ELICIT_API_KEY");
  return env != nullptr ? env : "";
}

std::string extract_completion(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ParseError("completion response is not JSON", body);
  }
  try {
    const auto& choice = j.at("choices").at(0);
    if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
    return choice.at("text").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("completion response has no choices[0].message.content", body);
  }
}

}  // namespace

void BackendConfig::validate() const {
  if (endpoint_url.empty()) throw ConfigError("backend endpoint_url is empty");
  split_url(endpoint_url);
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (request_timeout.count() <= 0) throw ConfigError("request_timeout must be > 0");
  if (temperature < 0.0 || temperature > 1.0) throw ConfigError("temperature must be in [0, 1]");
  if (max_in_flight == 0) throw ConfigError("max_in_flight must be >= 1");
}

std::chrono::milliseconds backoff_delay(const BackendConfig& cfg, int retry) {
  auto delay = cfg.backoff_base;
  for (int i = 1; i < retry && delay < cfg.backoff_cap; ++i) delay *= 2;
  return std::min(delay, cfg.backoff_cap);
}

std::string llm_complete(std::string_view prompt, const BackendConfig& cfg) {
  cfg.validate();
  const ParsedUrl url = split_url(cfg.endpoint_url);

  nlohmann::json request = {
      {"model", cfg.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
      {"temperature", cfg.temperature},
  };
  const std::string body = request.dump();
  httplib::Headers headers;
  if (std::string key = api_key(cfg); !key.empty()) {
    headers.emplace("Authorization", "Bearer " + key);
  }

  const int attempts = cfg.max_retries + 1;
  std::string last_problem;
  int last_status = 0;
  bool last_was_timeout = false;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) std::this_thread::sleep_for(backoff_delay(cfg, attempt - 1));

    httplib::Client client(url.base);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.request_timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(cfg.request_timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const auto started = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(url.path, headers, body, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;

    if (!res) {
      const httplib::Error err = res.error();
      last_status = 0;
      last_was_timeout = err == httplib::Error::ConnectionTimeout ||
                         (err == httplib::Error::Read && elapsed >= cfg.request_timeout);
      last_problem = httplib::to_string(err);
      continue;
    }
    last_was_timeout = false;
    const int status = res->status;
    if (status >= 200 && status < 300) return extract_completion(res->body);
    if (status >= 500 || status == 429) {
      last_status = status;
      last_problem = "HTTP " + std::to_string(status);
      continue;
    }
    throw HttpStatusError("endpoint returned HTTP " + std::to_string(status), status, res->body);
  }

  if (last_was_timeout) {
    throw TimeoutError("request timed out after " + std::to_string(attempts) + " attempt(s)",
                       attempts);
  }
  throw TransportError("request failed after " + std::to_string(attempts) +
                           " attempt(s): " + last_problem,
                       attempts, last_status);
}

LlmClient::LlmClient(BackendConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string LlmClient::complete(std::string_view prompt) const {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    const LlmClient* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};
  return llm_complete(prompt, cfg_);
}

}  // namespace elicit
