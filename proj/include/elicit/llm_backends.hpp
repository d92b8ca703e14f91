#pragma once

// LLM implementations of the backend roles. Every structured output is parsed
// with parse_structured_response and validated with the same checks applied to
// oracle output; malformed output is rejected, never silently accepted.

#include <memory>
#include <string>

#include "elicit/backends.hpp"
#include "elicit/llm_client.hpp"

namespace elicit {

// Prompt view of a partial profile. The question text of past turns appears
// only in QuestionsAndAnswers mode.
std::string render_history_block(const PartialProfile& state);

class LlmStructurer final : public Structurer {
 public:
  explicit LlmStructurer(std::shared_ptr<const LlmClient> client);
  StructuredProfile structure(std::string_view text, const std::string& source_id) const override;

 private:
  std::shared_ptr<const LlmClient> client_;
  std::string template_id_;
};

// Re-prompts once with the validation error when the first answer is not a
// permutation of the profile's tags.
class LlmRanker final : public Ranker {
 public:
  explicit LlmRanker(std::shared_ptr<const LlmClient> client);
  TagRanking rank(const StructuredProfile& profile) const override;

 private:
  std::shared_ptr<const LlmClient> client_;
  std::string template_id_;
};

class LlmFunnelGenerator final : public FunnelGenerator {
 public:
  explicit LlmFunnelGenerator(std::shared_ptr<const LlmClient> client);
  std::vector<QAPair> generate(const StructuredProfile& profile,
                               const TagRanking& ranking) const override;

 private:
  std::shared_ptr<const LlmClient> client_;
  std::string template_id_;
};

class LlmQuestioner final : public Questioner {
 public:
  explicit LlmQuestioner(std::shared_ptr<const LlmClient> client);
  std::string next_question(const QuestionContext& ctx) const override;

 private:
  std::shared_ptr<const LlmClient> client_;
  std::string template_id_;
};

class LlmAnswerer final : public Answerer {
 public:
  explicit LlmAnswerer(std::shared_ptr<const LlmClient> client);
  AnswerResult answer(std::string_view question, const StructuredProfile& profile) const override;

 private:
  std::shared_ptr<const LlmClient> client_;
  std::string template_id_;
};

class LlmAnswerInterpreter final : public AnswerInterpreter {
 public:
  explicit LlmAnswerInterpreter(std::shared_ptr<const LlmClient> client);
  AnswerResult interpret(std::string_view question, std::string_view reply,
                         const StructuredProfile& target) const override;

 private:
  std::shared_ptr<const LlmClient> client_;
  std::string template_id_;
};

}  // namespace elicit
