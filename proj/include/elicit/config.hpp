#pragma once

// Run configuration: one JSON document, overridable from the command line.
//
//   {
//     "seed": 7,
//     "parallelism": 4,
//     "paths": {"profiles": "data/profiles.jsonl", "out_dir": "out"},
//     "backends": {"questioner": "oracle", "simulator": "llm", ...},
//     "llm": {"endpoint_url": "http://localhost:8080/v1/chat/completions",
//             "model_name": "gemma-7b", "request_timeout_ms": 30000,
//             "max_retries": 2, "temperature": 0.7, "max_in_flight": 4},
//     "llm_roles": {"simulator": {"model_name": "gemma-7b-sim"}},
//     "session": {"max_questions": 10, "update_mode": "QuestionsAndAnswers"},
//     "forward": {"mode": "QuestionsAndAnswers"},
//     "synth": {"count": 100, "min_tags": 3, "max_tags": 9},
//     "stochastic_vocabulary": ["Genre", "Decade"]
//   }

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/codec.hpp"
#include "elicit/llm_client.hpp"
#include "elicit/session.hpp"
#include "elicit/synth.hpp"

namespace elicit {

enum class BackendKind { Oracle, Llm, Stochastic };

std::string_view to_string(BackendKind k);
BackendKind parse_backend_kind(std::string_view s);

struct RoleSelection {
  BackendKind structurer = BackendKind::Oracle;
  BackendKind ranker = BackendKind::Oracle;
  BackendKind generator = BackendKind::Oracle;
  BackendKind questioner = BackendKind::Oracle;
  BackendKind simulator = BackendKind::Oracle;
  BackendKind interpreter = BackendKind::Oracle;
};

inline constexpr const char* kBackendRoles[] = {"structurer", "ranker",    "generator",
                                                 "questioner", "simulator", "interpreter"};

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t parallelism = 1;
  std::map<std::string, std::filesystem::path> paths;
  RoleSelection roles;
  // Base endpoint settings. Its temperature applies to the questioner; every
  // other role runs at 0 unless llm_role_overrides says otherwise.
  BackendConfig llm;
  std::map<std::string, Json> llm_role_overrides;
  SessionConfig session;
  UpdateMode forward_mode = UpdateMode::QuestionsAndAnswers;
  SyntheticProfileSpec synth = SyntheticProfileSpec::defaults();
  std::size_t synth_count = 100;
  std::vector<std::string> stochastic_vocabulary;

  // Resolved endpoint settings for one role.
  BackendConfig llm_for(std::string_view role) const;

  // Applies `seed` to the session and synthetic generator.
  void set_seed(std::uint64_t s);

  // Throws ConfigError: duplicate paths, invalid session/synth blocks.
  void validate() const;
};

RunConfig run_config_from_json(const Json& j);
// Throws IoError for a missing file and ConfigError for a malformed one.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace elicit
