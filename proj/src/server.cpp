#include "elicit/server.hpp"

#include <fstream>

#include <httplib.h>

#include "elicit/metrics.hpp"
#include "elicit/text.hpp"

namespace elicit {
namespace {

Json entries_json(const Entries& e) { return to_json(std::span<const Entry>(e)); }

std::size_t size_or(const Json& body, const char* key, std::size_t fallback) {
  if (!body.contains(key)) return fallback;
  const Json& v = body[key];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ApiError(400, std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

SessionService::SessionService(const Questioner& questioner, const AnswerInterpreter& interpreter,
                               ServiceOptions options)
    : questioner_(questioner), interpreter_(interpreter), options_(std::move(options)) {
  options_.session.validate();
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown session '" + id + "'");
  return it->second;
}

Json SessionService::view(const Slot& slot) const {
  const Session& s = *slot.session;
  Json o = Json::object();
  o["session_id"] = slot.id;
  o["status"] = s.finished() ? "terminated" : "active";
  o["question"] = s.finished() ? Json(nullptr) : Json(s.pending_question());
  o["question_count"] = s.question_count();
  o["max_questions"] = options_.session.max_questions;
  o["termination"] = s.finished() ? Json(std::string(to_string(*s.termination()))) : Json(nullptr);
  o["mode"] = std::string(to_string(s.state().mode));
  Json turns = Json::array();
  for (const QAPair& qa : s.state().history) turns.push_back(turn_to_json(qa));
  o["turns"] = std::move(turns);
  Json rec = Json::object();
  rec["source_id"] = s.target().source_id();
  rec["entries"] = entries_json(s.state().entries);
  o["reconstructed"] = std::move(rec);
  o["added"] = entries_json(s.last_added());
  return o;
}

Json SessionService::create(const Json& body) {
  if (!body.is_object()) throw ApiError(400, "request body must be a JSON object");
  const bool has_target = body.contains("target");
  const bool has_synth = body.contains("synthetic");
  if (has_target == has_synth) throw ApiError(400, "give exactly one of 'target' or 'synthetic'");

  SessionConfig cfg = options_.session;
  StructuredProfile target;
  try {
    cfg.max_questions = size_or(body, "max_questions", cfg.max_questions);
    if (body.contains("update_mode")) {
      if (!body["update_mode"].is_string()) throw ApiError(400, "'update_mode' must be a string");
      cfg.update_mode = parse_update_mode(body["update_mode"].get<std::string>());
    }
    if (body.contains("seed")) cfg.seed = size_or(body, "seed", 0);
    cfg.validate();
    if (has_target) {
      target = profile_from_json(body["target"]);
    } else {
      const Json& spec_json = body["synthetic"];
      if (!spec_json.is_object()) throw ApiError(400, "'synthetic' must be an object");
      SyntheticProfileSpec spec = options_.synth;
      spec.seed = size_or(spec_json, "seed", spec.seed);
      spec.min_tags = size_or(spec_json, "min_tags", spec.min_tags);
      spec.max_tags = size_or(spec_json, "max_tags", spec.max_tags);
      if (spec_json.contains("vocabulary")) {
        spec.vocabulary = spec_json["vocabulary"].get<std::vector<std::string>>();
      }
      target = synth_profiles(spec, 1).front();
    }
    if (target.empty()) throw ApiError(400, "target profile has no entries");
  } catch (const ApiError&) {
    throw;
  } catch (const PolicyError&) {
    throw;
  } catch (const std::exception& e) {
    throw ApiError(400, e.what());
  }

  auto slot = std::make_shared<Slot>();
  {
    std::lock_guard lock(mu_);
    slot->id = "s" + std::to_string(next_id_++);
  }
  try {
    slot->session = std::make_unique<Session>(questioner_, std::move(target), cfg);
  } catch (const PolicyError& e) {
    throw ApiError(502, e.what());
  } catch (const std::exception& e) {
    throw ApiError(400, e.what());
  }
  {
    std::lock_guard lock(mu_);
    sessions_.emplace(slot->id, slot);
  }
  if (slot->session->finished()) log_transcript(*slot->session);
  return view(*slot);
}

Json SessionService::answer(const std::string& id, const Json& body) {
  std::shared_ptr<Slot> slot = find(id);
  if (!body.is_object()) throw ApiError(400, "request body must be a JSON object");
  const bool no_pref = body.contains("no_preference") && body["no_preference"].is_boolean() &&
                       body["no_preference"].get<bool>();
  const bool has_text = body.contains("answer");
  if (has_text && !body["answer"].is_string()) throw ApiError(400, "'answer' must be a string");
  if (no_pref == has_text) throw ApiError(400, "give either 'answer' or 'no_preference': true");

  std::lock_guard turn(slot->turn);
  Session& s = *slot->session;
  if (s.finished()) throw ApiError(409, "session '" + id + "' has already terminated");

  std::string raw = no_pref ? std::string(kNoPreference) : body["answer"].get<std::string>();
  AnswerResult result;
  if (no_pref) {
    result = AnswerResult::no_preference();
  } else {
    try {
      result = interpreter_.interpret(s.pending_question(), raw, s.target());
    } catch (const std::exception& e) {
      throw ApiError(502, std::string("answer interpretation failed: ") + e.what());
    }
  }
  try {
    s.submit(result, raw);
  } catch (const InconsistentAnswerError& e) {
    throw ApiError(422, e.what());
  } catch (const PolicyError& e) {
    throw ApiError(502, e.what());
  }
  if (s.finished()) log_transcript(s);
  return view(*slot);
}

Json SessionService::get(const std::string& id) const {
  std::shared_ptr<Slot> slot = find(id);
  std::lock_guard turn(slot->turn);
  Json o = view(*slot);
  o["transcript"] = to_json(slot->session->transcript());
  return o;
}

Json SessionService::metrics(const std::string& id) const {
  std::shared_ptr<Slot> slot = find(id);
  std::lock_guard turn(slot->turn);
  const Session& s = *slot->session;
  const std::string cand = flatten_sorted(s.state());
  const std::string ref = flatten_sorted(s.target());
  const RougeScores r = rouge(cand, ref);
  Json o = Json::object();
  o["session_id"] = id;
  o["question_count"] = s.question_count();
  o["status"] = s.finished() ? "terminated" : "active";
  o["bleu"] = bleu(cand, ref);
  o["rouge1_f"] = r.rouge1_f;
  o["rougeL_f"] = r.rougeL_f;
  return o;
}

void SessionService::log_transcript(const Session& session) {
  if (options_.transcript_log.empty()) return;
  std::lock_guard lock(log_mu_);
  std::ofstream out(options_.transcript_log, std::ios::app | std::ios::binary);
  out << to_json(session.transcript()).dump() << '\n';
}

HttpServer::HttpServer(SessionService& service, std::filesystem::path static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto respond = [](httplib::Response& res, auto&& handler) {
    try {
      Json body = handler();
      res.status = 200;
      res.set_content(body.dump(), "application/json");
    } catch (const ApiError& e) {
      res.status = e.status();
      res.set_content(Json{{"error", e.what()}, {"status", e.status()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(Json{{"error", e.what()}, {"status", 500}}.dump(), "application/json");
    }
  };
  auto parse = [](const httplib::Request& req) {
    try {
      return Json::parse(req.body.empty() ? std::string("{}") : req.body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ApiError(400, std::string("malformed JSON body: ") + e.what());
    }
  };

  server_->Post("/sessions", [this, respond, parse](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return service_.create(parse(req)); });
  });
  server_->Post(R"(/sessions/([^/]+)/answer)",
                [this, respond, parse](const httplib::Request& req, httplib::Response& res) {
                  respond(res, [&] { return service_.answer(req.matches[1], parse(req)); });
                });
  server_->Get(R"(/sessions/([^/]+)/metrics)",
               [this, respond](const httplib::Request& req, httplib::Response& res) {
                 respond(res, [&] { return service_.metrics(req.matches[1]); });
               });
  server_->Get(R"(/sessions/([^/]+))", [this, respond](const httplib::Request& req, httplib::Response& res) {
    respond(res, [&] { return service_.get(req.matches[1]); });
  });
  if (!static_dir.empty()) {
    if (!server_->set_mount_point("/", static_dir.string())) {
      throw IoError("static directory '" + static_dir.string() + "' does not exist");
    }
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace elicit
