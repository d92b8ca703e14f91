#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace elicit::prompts {

// Versioned prompt templates. Placeholders are written {{name}}.
struct PromptTemplate {
  std::string id;
  std::string role;
  std::string text;
};

inline constexpr std::string_view kStructure = "structure/v1";
inline constexpr std::string_view kRank = "rank/v1";
inline constexpr std::string_view kFunnel = "funnel/v1";
inline constexpr std::string_view kQuestion = "question/v1";
inline constexpr std::string_view kAnswer = "answer/v1";
inline constexpr std::string_view kInterpret = "interpret/v1";

// Throws ConfigError for an unknown id.
const PromptTemplate& find(std::string_view id);
std::vector<std::string> ids();

// Substitutes every {{name}}; throws ConfigError for a placeholder with no value.
std::string render(std::string_view id, const std::map<std::string, std::string>& vars);

}  // namespace elicit::prompts
