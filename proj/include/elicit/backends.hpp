#pragma once

// Pluggable intelligence providers. Each role is a narrow interface with a
// deterministic rule-based oracle and an LLM implementation (llm_backends.hpp).
// All implementations must be callable concurrently from several threads.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/profile.hpp"

namespace elicit {

// Canonical no-preference answer. "I don't know" and friends are normalized to it.
inline constexpr std::string_view kNoPreference = "No Preference";

// True for the sentinel and the usual "I don't know" phrasings.
bool is_no_preference_text(std::string_view answer);

struct AnswerResult {
  std::string answer_text;
  Entries addressed;
  bool is_no_preference = false;

  static AnswerResult no_preference();
  bool operator==(const AnswerResult&) const = default;
};

// Tags ordered most general first.
struct TagRanking {
  std::vector<std::string> tags;

  bool operator==(const TagRanking&) const = default;
};

// What a Questioner sees when asked for the next question.
//
// `target` is the hidden profile. Only oracle test policies may read it; an
// LLM questioner works from `state` alone.
struct QuestionContext {
  const PartialProfile& state;
  const StructuredProfile& target;
  std::mt19937_64& rng;
  std::size_t turn;
};

class Structurer {
 public:
  virtual ~Structurer() = default;
  virtual StructuredProfile structure(std::string_view text, const std::string& source_id) const = 0;
};

class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual TagRanking rank(const StructuredProfile& profile) const = 0;
};

// Forward-process funnel generation: full profile + ranking -> QA pairs.
class FunnelGenerator {
 public:
  virtual ~FunnelGenerator() = default;
  virtual std::vector<QAPair> generate(const StructuredProfile& profile,
                                       const TagRanking& ranking) const = 0;
};

// Session-time question generation.
class Questioner {
 public:
  virtual ~Questioner() = default;
  virtual std::string next_question(const QuestionContext& ctx) const = 0;
};

// User simulator: answers a question from a full profile.
class Answerer {
 public:
  virtual ~Answerer() = default;
  virtual AnswerResult answer(std::string_view question, const StructuredProfile& profile) const = 0;
};

// Maps a human's free-text reply onto target entries (live sessions).
class AnswerInterpreter {
 public:
  virtual ~AnswerInterpreter() = default;
  virtual AnswerResult interpret(std::string_view question, std::string_view reply,
                                 const StructuredProfile& target) const = 0;
};

// ---------------------------------------------------------------------------
// Oracles

// Concept lexicon, most general first. Tags outside it rank after all known
// tags, in lexicographic order of their normalized form.
inline constexpr std::string_view kLexiconVersion = "movie-concepts/v1";
const std::vector<std::string>& generality_lexicon();

// Template question for a tag; the tag is embedded verbatim.
std::string oracle_question_for(std::string_view tag);

// Tag embedded in a template question, or empty when `question` is not one.
std::string question_template_tag(std::string_view question);

// Parses `tag: content` lines (split at the first colon), skipping blank and
// colon-less lines. Throws ProfileError on empty extraction or duplicate tag.
StructuredProfile oracle_structure(std::string_view text, const std::string& source_id = {});

TagRanking oracle_rank(const StructuredProfile& profile);

std::vector<QAPair> oracle_funnel(const StructuredProfile& profile, const TagRanking& ranking);

// Answers from the question's embedded tag; falls back to the longest profile
// tag mentioned in the question. Never fabricates content.
AnswerResult oracle_answer(std::string_view question, const StructuredProfile& full_profile);

// Template question for the most general tag of `full` (per `ranking`) absent
// from `state`. In QuestionsAndAnswers mode tags already asked are skipped
// while any unasked absent tag remains. Throws ValidationError when no tag is
// absent.
std::string oracle_generate_question(const PartialProfile& state, const StructuredProfile& full,
                                     const TagRanking& ranking);

class OracleStructurer final : public Structurer {
 public:
  StructuredProfile structure(std::string_view text, const std::string& source_id) const override;
};

class OracleRanker final : public Ranker {
 public:
  TagRanking rank(const StructuredProfile& profile) const override;
};

class OracleFunnelGenerator final : public FunnelGenerator {
 public:
  std::vector<QAPair> generate(const StructuredProfile& profile,
                               const TagRanking& ranking) const override;
};

// Funnel questioner over the target's own tags, ranked by the lexicon.
class OracleQuestioner final : public Questioner {
 public:
  std::string next_question(const QuestionContext& ctx) const override;
};

class OracleAnswerer final : public Answerer {
 public:
  AnswerResult answer(std::string_view question, const StructuredProfile& profile) const override;
};

// Exact (normalized) content match against the target; unmatched replies are
// no-preference.
class OracleAnswerInterpreter final : public AnswerInterpreter {
 public:
  AnswerResult interpret(std::string_view question, std::string_view reply,
                         const StructuredProfile& target) const override;
};

// Repetition-prone test questioner: samples uniformly among the template
// questions of a fixed vocabulary, excluding only questions it can see were
// already asked. The question history is visible in QuestionsAndAnswers mode
// and hidden in AnswersOnly mode, so the latter repeats.
class StochasticTemplateQuestioner final : public Questioner {
 public:
  explicit StochasticTemplateQuestioner(std::vector<std::string> vocabulary);
  std::string next_question(const QuestionContext& ctx) const override;

 private:
  std::vector<std::string> vocabulary_;
};

// Questions a Questioner is allowed to see in `state` (empty in AnswersOnly).
std::vector<std::string> visible_questions(const PartialProfile& state);

// Uniform integer in [0, n) by rejection; stable across standard libraries.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

}  // namespace elicit
