#pragma once

// Live elicitation sessions over HTTP. SessionService holds the logic and is
// usable without a socket; HttpServer binds it to cpp-httplib routes:
//
//   POST /sessions                 {"target": <profile>} | {"synthetic": {...}}
//   POST /sessions/{id}/answer     {"answer": "..."} | {"no_preference": true}
//   GET  /sessions/{id}            session view + full transcript
//   GET  /sessions/{id}/metrics    live scores against the hidden target

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "elicit/backends.hpp"
#include "elicit/codec.hpp"
#include "elicit/errors.hpp"
#include "elicit/session.hpp"
#include "elicit/synth.hpp"

namespace httplib {
class Server;
}

namespace elicit {

// Error carrying the HTTP status it maps to.
class ApiError : public Error {
 public:
  ApiError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct ServiceOptions {
  SessionConfig session;
  SyntheticProfileSpec synth = SyntheticProfileSpec::defaults();
  // Finished transcripts are appended here as JSONL when set.
  std::filesystem::path transcript_log;
};

class SessionService {
 public:
  // Both policies must outlive the service.
  SessionService(const Questioner& questioner, const AnswerInterpreter& interpreter,
                 ServiceOptions options);

  Json create(const Json& body);
  Json answer(const std::string& id, const Json& body);
  Json get(const std::string& id) const;
  Json metrics(const std::string& id) const;

 private:
  struct Slot {
    std::mutex turn;  // one turn in flight per session
    std::string id;
    std::unique_ptr<Session> session;
  };

  std::shared_ptr<Slot> find(const std::string& id) const;
  Json view(const Slot& slot) const;
  void log_transcript(const Session& session);

  const Questioner& questioner_;
  const AnswerInterpreter& interpreter_;
  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 1;
  std::mutex log_mu_;
};

class HttpServer {
 public:
  // Files under `static_dir` (the web UI bundle) are served from "/" when set.
  explicit HttpServer(SessionService& service, std::filesystem::path static_dir = {});
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws IoError.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace elicit
