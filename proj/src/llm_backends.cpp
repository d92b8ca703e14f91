#include "elicit/llm_backends.hpp"

#include "elicit/codec.hpp"
#include "elicit/errors.hpp"
#include "elicit/forward.hpp"
#include "elicit/prompts.hpp"
#include "elicit/structured_response.hpp"
#include "elicit/text.hpp"

namespace elicit {
namespace {

std::string template_or(const std::shared_ptr<const LlmClient>& client, std::string_view fallback) {
  if (!client) throw ConfigError("LLM backend constructed without a client");
  const std::string& id = client->config().prompt_template_id;
  std::string chosen = id.empty() ? std::string(fallback) : id;
  prompts::find(chosen);  // fail at construction for unknown ids
  return chosen;
}

std::string profile_json(const StructuredProfile& p) { return to_json(p).dump(2); }

std::string entries_json(const Entries& e) {
  Json o = Json::object();
  o["entries"] = to_json(std::span<const Entry>(e));
  return o.dump(2);
}

std::vector<std::string> string_array(const nlohmann::json& j, const std::string& raw,
                                      const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be a JSON array", raw);
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParseError(std::string(what) + " must contain strings", raw);
    out.push_back(v.get<std::string>());
  }
  return out;
}

// Resolves tag names against the profile; unknown tags are malformed output.
Entries resolve_tags(const std::vector<std::string>& tags, const StructuredProfile& profile,
                     const std::string& raw) {
  Entries out;
  for (const std::string& tag : tags) {
    const Entry* e = profile.find(tag);
    if (e == nullptr) throw ParseError("response names unknown tag '" + tag + "'", raw);
    bool dup = false;
    for (const Entry& have : out) dup = dup || same_entry(have, *e);
    if (!dup) out.push_back(*e);
  }
  return out;
}

std::string strip_question(std::string raw) {
  std::string q = trim(raw);
  if (!q.empty() && (q.front() == '{' || q.find("```") != std::string::npos)) {
    try {
      auto j = parse_structured_response(q);
      if (j.is_object() && j.contains("question") && j["question"].is_string()) {
        q = trim(j["question"].get<std::string>());
      }
    } catch (const ParseError&) {
    }
  }
  if (q.size() >= 2 && q.front() == '"' && q.back() == '"') q = trim(q.substr(1, q.size() - 2));
  return q;
}

}  // namespace

std::string render_history_block(const PartialProfile& state) {
  if (state.history.empty()) return "";
  std::string out;
  if (state.mode == UpdateMode::QuestionsAndAnswers) {
    out = "\nQuestions already asked and the user's answers:\n";
    for (const QAPair& qa : state.history) out += "Q: " + qa.question + "\nA: " + qa.answer + "\n";
  } else {
    out = "\nAnswers given so far:\n";
    for (const QAPair& qa : state.history) out += "- " + qa.answer + "\n";
  }
  return out;
}

LlmStructurer::LlmStructurer(std::shared_ptr<const LlmClient> client)
    : client_(std::move(client)), template_id_(template_or(client_, prompts::kStructure)) {}

StructuredProfile LlmStructurer::structure(std::string_view text,
                                           const std::string& source_id) const {
  const std::string raw =
      client_->complete(prompts::render(template_id_, {{"profile_text", std::string(text)}}));
  nlohmann::json j = parse_structured_response(raw);
  Entries entries;
  try {
    if (j.is_object() && j.contains("entries")) {
      for (const auto& e : j.at("entries")) {
        entries.push_back(Entry{e.at("tag").get<std::string>(), e.at("content").get<std::string>()});
      }
    } else if (j.is_object()) {
      // {"Genre": "...", ...} is accepted as well
      for (const auto& [tag, content] : j.items()) {
        entries.push_back(Entry{tag, content.get<std::string>()});
      }
    } else {
      throw ParseError("structurer output is not an object", raw);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("structurer output has the wrong shape: ") + e.what(), raw);
  }
  if (entries.empty()) throw ValidationError("structurer extracted no entries");
  try {
    return StructuredProfile(source_id, std::move(entries));
  } catch (const ProfileError& e) {
    throw ValidationError(std::string("structurer output rejected: ") + e.what());
  }
}

LlmRanker::LlmRanker(std::shared_ptr<const LlmClient> client)
    : client_(std::move(client)), template_id_(template_or(client_, prompts::kRank)) {}

TagRanking LlmRanker::rank(const StructuredProfile& profile) const {
  std::string tags;
  for (const Entry& e : profile.entries()) tags += "- " + e.tag + "\n";
  const std::string prompt =
      prompts::render(template_id_, {{"tags", tags}, {"profile_json", profile_json(profile)}});

  auto attempt = [&](const std::string& p) {
    const std::string raw = client_->complete(p);
    TagRanking ranking{string_array(parse_structured_response(raw), raw, "ranking")};
    // canonical spelling from the profile
    for (std::string& t : ranking.tags) {
      if (const Entry* e = profile.find(t)) t = e->tag;
    }
    validate_ranking(profile, ranking);
    return ranking;
  };

  try {
    return attempt(prompt);
  } catch (const ValidationError& e) {
    return attempt(prompt + "\n\nYour previous answer was invalid (" + e.what() +
                   "). Return every tag exactly once.");
  } catch (const ParseError& e) {
    return attempt(prompt + "\n\nYour previous answer was not valid JSON (" + e.what() +
                   "). Respond with a JSON array of strings only.");
  }
}

LlmFunnelGenerator::LlmFunnelGenerator(std::shared_ptr<const LlmClient> client)
    : client_(std::move(client)), template_id_(template_or(client_, prompts::kFunnel)) {}

std::vector<QAPair> LlmFunnelGenerator::generate(const StructuredProfile& profile,
                                                 const TagRanking& ranking) const {
  std::string ranked;
  for (std::size_t i = 0; i < ranking.tags.size(); ++i) {
    ranked += std::to_string(i + 1) + ". " + ranking.tags[i] + "\n";
  }
  const std::string raw = client_->complete(
      prompts::render(template_id_, {{"ranking", ranked}, {"profile_json", profile_json(profile)}}));
  nlohmann::json j = parse_structured_response(raw);
  if (!j.is_array()) throw ParseError("funnel output must be a JSON array", raw);
  std::vector<QAPair> funnel;
  for (const auto& item : j) {
    try {
      QAPair qa;
      qa.question = trim(item.at("question").get<std::string>());
      qa.answer = trim(item.at("answer").get<std::string>());
      qa.addressed = resolve_tags(string_array(item.at("addressed"), raw, "addressed"), profile, raw);
      qa.position = funnel.size();
      funnel.push_back(std::move(qa));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("funnel item has the wrong shape: ") + e.what(), raw);
    }
  }
  validate_funnel(profile, ranking, funnel);
  return funnel;
}

LlmQuestioner::LlmQuestioner(std::shared_ptr<const LlmClient> client)
    : client_(std::move(client)), template_id_(template_or(client_, prompts::kQuestion)) {}

std::string LlmQuestioner::next_question(const QuestionContext& ctx) const {
  const std::string raw = client_->complete(prompts::render(
      template_id_, {{"history_block", render_history_block(ctx.state)},
                     {"profile_json", entries_json(ctx.state.entries)}}));
  std::string q = strip_question(raw);
  if (q.empty()) throw ValidationError("questioner returned an empty question");
  return q;
}

LlmAnswerer::LlmAnswerer(std::shared_ptr<const LlmClient> client)
    : client_(std::move(client)), template_id_(template_or(client_, prompts::kAnswer)) {}

AnswerResult LlmAnswerer::answer(std::string_view question, const StructuredProfile& profile) const {
  const std::string raw = client_->complete(prompts::render(
      template_id_, {{"profile_json", profile_json(profile)}, {"question", std::string(question)}}));
  nlohmann::json j = parse_structured_response(raw);
  std::string text;
  std::vector<std::string> tags;
  try {
    text = trim(j.at("answer").get<std::string>());
    if (j.contains("addressed")) tags = string_array(j.at("addressed"), raw, "addressed");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("answer output has the wrong shape: ") + e.what(), raw);
  }
  if (text.empty() || is_no_preference_text(text)) return AnswerResult::no_preference();
  Entries addressed = resolve_tags(tags, profile, raw);
  if (addressed.empty()) return AnswerResult::no_preference();
  return AnswerResult{text, std::move(addressed), false};
}

LlmAnswerInterpreter::LlmAnswerInterpreter(std::shared_ptr<const LlmClient> client)
    : client_(std::move(client)), template_id_(template_or(client_, prompts::kInterpret)) {}

AnswerResult LlmAnswerInterpreter::interpret(std::string_view question, std::string_view reply,
                                             const StructuredProfile& target) const {
  if (trim(reply).empty() || is_no_preference_text(reply)) return AnswerResult::no_preference();
  const std::string raw = client_->complete(
      prompts::render(template_id_, {{"profile_json", profile_json(target)},
                                     {"question", std::string(question)},
                                     {"reply", std::string(reply)}}));
  nlohmann::json j = parse_structured_response(raw);
  std::vector<std::string> tags;
  try {
    tags = string_array(j.at("addressed"), raw, "addressed");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("interpreter output has the wrong shape: ") + e.what(), raw);
  }
  Entries addressed = resolve_tags(tags, target, raw);
  if (addressed.empty()) return AnswerResult::no_preference();
  return AnswerResult{trim(reply), std::move(addressed), false};
}

}  // namespace elicit
