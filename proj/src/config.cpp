#include "elicit/config.hpp"

#include <set>

#include "elicit/backends.hpp"
#include "elicit/errors.hpp"

namespace elicit {
namespace {

void apply_llm_fields(BackendConfig& cfg, const Json& j) {
  if (!j.is_object()) throw ConfigError("llm block must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "endpoint_url") cfg.endpoint_url = value.get<std::string>();
    else if (key == "model_name") cfg.model_name = value.get<std::string>();
    else if (key == "request_timeout_ms") cfg.request_timeout = std::chrono::milliseconds(value.get<long long>());
    else if (key == "max_retries") cfg.max_retries = value.get<int>();
    else if (key == "temperature") cfg.temperature = value.get<double>();
    else if (key == "prompt_template_id") cfg.prompt_template_id = value.get<std::string>();
    else if (key == "api_key") cfg.api_key = value.get<std::string>();
    else if (key == "backoff_base_ms") cfg.backoff_base = std::chrono::milliseconds(value.get<long long>());
    else if (key == "backoff_cap_ms") cfg.backoff_cap = std::chrono::milliseconds(value.get<long long>());
    else if (key == "max_in_flight") cfg.max_in_flight = value.get<std::size_t>();
    else throw ConfigError("unknown llm setting '" + key + "'");
  }
}

BackendKind& role_slot(RoleSelection& roles, std::string_view role) {
  if (role == "structurer") return roles.structurer;
  if (role == "ranker") return roles.ranker;
  if (role == "generator") return roles.generator;
  if (role == "questioner") return roles.questioner;
  if (role == "simulator") return roles.simulator;
  if (role == "interpreter") return roles.interpreter;
  throw ConfigError("unknown backend role '" + std::string(role) + "'");
}

}  // namespace

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::Oracle: return "oracle";
    case BackendKind::Llm: return "llm";
    case BackendKind::Stochastic: return "stochastic";
  }
  return "oracle";
}

BackendKind parse_backend_kind(std::string_view s) {
  if (s == "oracle") return BackendKind::Oracle;
  if (s == "llm") return BackendKind::Llm;
  if (s == "stochastic") return BackendKind::Stochastic;
  throw ConfigError("unknown backend '" + std::string(s) + "' (expected oracle, llm or stochastic)");
}

BackendConfig RunConfig::llm_for(std::string_view role) const {
  BackendConfig cfg = llm;
  if (role != "questioner") cfg.temperature = 0.0;
  if (auto it = llm_role_overrides.find(std::string(role)); it != llm_role_overrides.end()) {
    apply_llm_fields(cfg, it->second);
  }
  return cfg;
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  session.seed = s;
  synth.seed = s;
}

void RunConfig::validate() const {
  std::set<std::filesystem::path> seen;
  for (const auto& [name, path] : paths) {
    if (path.empty()) continue;
    if (!seen.insert(path.lexically_normal()).second) {
      throw ConfigError("path '" + path.string() + "' is referenced more than once");
    }
  }
  session.validate();
  synth.validate();
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (roles.questioner == BackendKind::Stochastic && stochastic_vocabulary.empty() &&
      synth.vocabulary.empty()) {
    throw ConfigError("stochastic questioner needs a vocabulary");
  }
  for (BackendKind k : {roles.structurer, roles.ranker, roles.generator, roles.simulator,
                        roles.interpreter}) {
    if (k == BackendKind::Stochastic) {
      throw ConfigError("only the questioner role has a stochastic backend");
    }
  }
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") {
        cfg.set_seed(value.get<std::uint64_t>());
      } else if (key == "parallelism") {
        cfg.parallelism = value.get<std::size_t>();
      } else if (key == "paths") {
        for (const auto& [name, p] : value.items()) cfg.paths[name] = p.get<std::string>();
      } else if (key == "backends") {
        for (const auto& [role, kind] : value.items()) {
          role_slot(cfg.roles, role) = parse_backend_kind(kind.get<std::string>());
        }
      } else if (key == "llm") {
        apply_llm_fields(cfg.llm, value);
      } else if (key == "llm_roles") {
        for (const auto& [role, overrides] : value.items()) {
          role_slot(cfg.roles, role);  // reject unknown role names
          BackendConfig probe;
          apply_llm_fields(probe, overrides);
          cfg.llm_role_overrides[role] = overrides;
        }
      } else if (key == "session") {
        for (const auto& [k, v] : value.items()) {
          if (k == "max_questions") cfg.session.max_questions = v.get<std::size_t>();
          else if (k == "update_mode") cfg.session.update_mode = parse_update_mode(v.get<std::string>());
          else throw ConfigError("unknown session setting '" + k + "'");
        }
      } else if (key == "forward") {
        for (const auto& [k, v] : value.items()) {
          if (k == "mode") cfg.forward_mode = parse_update_mode(v.get<std::string>());
          else throw ConfigError("unknown forward setting '" + k + "'");
        }
      } else if (key == "synth") {
        for (const auto& [k, v] : value.items()) {
          if (k == "count") cfg.synth_count = v.get<std::size_t>();
          else if (k == "min_tags") cfg.synth.min_tags = v.get<std::size_t>();
          else if (k == "max_tags") cfg.synth.max_tags = v.get<std::size_t>();
          else if (k == "vocabulary") cfg.synth.vocabulary = v.get<std::vector<std::string>>();
          else throw ConfigError("unknown synth setting '" + k + "'");
        }
      } else if (key == "stochastic_vocabulary") {
        cfg.stochastic_vocabulary = value.get<std::vector<std::string>>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace elicit
