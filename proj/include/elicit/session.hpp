#pragma once

// Reverse process: a Questioner and a user-simulator policy take turns against
// a hidden target profile until the reconstruction matches it or the question
// budget runs out.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "elicit/backends.hpp"
#include "elicit/profile.hpp"

namespace elicit {

struct SessionConfig {
  std::size_t max_questions = 10;
  UpdateMode update_mode = UpdateMode::QuestionsAndAnswers;
  // Starting reconstruction; its mode is overridden by update_mode.
  PartialProfile start_state;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TerminationCheck { Continue, ProfileMatch, BudgetExhausted };

// ProfileMatch wins when both the match and the budget condition hold.
TerminationCheck check_termination(const PartialProfile& current, const StructuredProfile& target,
                                   std::size_t count, std::size_t budget);

// Turn-by-turn driver. The batch runner and the HTTP service both go through
// this class, so a live session and a simulated one follow the same rules.
//
//   Session s(questioner, target, cfg);
//   while (!s.finished()) s.submit(simulator.answer(s.pending_question(), target));
class Session {
 public:
  // Asks the first question immediately unless the start state already ends
  // the session. Questioner failures surface as PolicyError.
  Session(const Questioner& questioner, StructuredProfile target, const SessionConfig& cfg);

  bool finished() const noexcept { return termination_.has_value(); }
  // Throws std::logic_error once finished.
  const std::string& pending_question() const;

  // Records the answer to the pending question, applies the transition and,
  // if the session continues, asks the next question. Addressed entries must
  // come from the target (PolicyError otherwise); conflicting entries raise
  // InconsistentAnswerError. `raw` is kept in the debug channel.
  void submit(const AnswerResult& answer, std::string raw = {});

  const PartialProfile& state() const noexcept { return state_; }
  const StructuredProfile& target() const noexcept { return target_; }
  std::size_t question_count() const noexcept { return turns_.size(); }
  std::optional<Termination> termination() const noexcept { return termination_; }
  // Entries added by the most recent turn.
  const Entries& last_added() const noexcept { return last_added_; }

  // Snapshot; while the session is active the termination field holds
  // QuestionBudgetExhausted as a placeholder.
  Transcript transcript() const;

 private:
  void advance();

  const Questioner& questioner_;
  StructuredProfile target_;
  std::size_t budget_;
  std::mt19937_64 rng_;
  PartialProfile state_;
  std::vector<QAPair> turns_;
  std::vector<TurnDebug> debug_;
  Entries last_added_;
  std::string pending_;
  std::optional<Termination> termination_;
  double pending_elapsed_ms_ = 0.0;
};

Transcript run_session(const Questioner& questioner, const Answerer& simulator,
                       const StructuredProfile& target, const SessionConfig& cfg);

struct SessionFailure {
  std::size_t index = 0;
  std::string source_id;
  std::string message;
};

struct BatchResult {
  // Successful sessions in target order.
  std::vector<Transcript> transcripts;
  std::vector<SessionFailure> failures;
};

// Seed used for the session at `index` of a batch run with `seed`.
std::uint64_t session_seed(std::uint64_t seed, std::size_t index);

// Independent sessions, one per target, up to `parallelism` at a time. A
// failing session is recorded and the batch continues.
BatchResult run_batch(const Questioner& questioner, const Answerer& simulator,
                      std::span<const StructuredProfile> targets, const SessionConfig& cfg,
                      std::size_t parallelism = 1);

}  // namespace elicit
