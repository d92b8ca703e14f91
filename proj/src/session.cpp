#include "elicit/session.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <stdexcept>
#include <thread>

#include "elicit/codec.hpp"
#include "elicit/errors.hpp"

namespace elicit {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void SessionConfig::validate() const {
  if (max_questions < 1) throw ConfigError("max_questions must be >= 1");
}

TerminationCheck check_termination(const PartialProfile& current, const StructuredProfile& target,
                                   std::size_t count, std::size_t budget) {
  if (profiles_equal(current, target)) return TerminationCheck::ProfileMatch;
  if (count >= budget) return TerminationCheck::BudgetExhausted;
  return TerminationCheck::Continue;
}

Session::Session(const Questioner& questioner, StructuredProfile target, const SessionConfig& cfg)
    : questioner_(questioner),
      target_(std::move(target)),
      budget_(cfg.max_questions),
      rng_(cfg.seed),
      state_(cfg.start_state) {
  cfg.validate();
  if (target_.empty()) throw ValidationError("session target profile is empty");
  if (!entries_subset(state_.entries, target_.entries())) {
    throw ValidationError("session start state contains entries absent from the target");
  }
  state_.mode = cfg.update_mode;
  advance();
}

const std::string& Session::pending_question() const {
  if (finished()) throw std::logic_error("session already finished");
  return pending_;
}

void Session::advance() {
  switch (check_termination(state_, target_, turns_.size(), budget_)) {
    case TerminationCheck::ProfileMatch:
      termination_ = Termination::ProfileMatch;
      return;
    case TerminationCheck::BudgetExhausted:
      termination_ = Termination::QuestionBudgetExhausted;
      return;
    case TerminationCheck::Continue:
      break;
  }
  const std::size_t turn = turns_.size();
  const auto start = Clock::now();
  try {
    pending_ = questioner_.next_question(QuestionContext{state_, target_, rng_, turn});
  } catch (const std::exception& e) {
    std::throw_with_nested(
        PolicyError("questioner failed at turn " + std::to_string(turn) + ": " + e.what(), turn));
  }
  if (pending_.empty()) {
    throw PolicyError("questioner returned an empty question at turn " + std::to_string(turn), turn);
  }
  pending_elapsed_ms_ = ms_since(start);
}

void Session::submit(const AnswerResult& answer, std::string raw) {
  const std::size_t turn = turns_.size();
  if (finished()) throw std::logic_error("session already finished");
  const auto start = Clock::now();

  QAPair qa;
  qa.question = pending_;
  qa.position = turn;
  if (answer.is_no_preference || answer.addressed.empty()) {
    qa.answer = std::string(kNoPreference);
  } else {
    if (!entries_subset(answer.addressed, target_.entries())) {
      throw PolicyError("simulator addressed entries absent from the target at turn " +
                            std::to_string(turn),
                        turn);
    }
    qa.answer = answer.answer_text;
    qa.addressed = answer.addressed;
  }

  PartialProfile next = apply_transition(state_, qa);
  last_added_.assign(next.entries.begin() + static_cast<std::ptrdiff_t>(state_.entries.size()),
                     next.entries.end());
  state_ = std::move(next);
  turns_.push_back(qa);
  if (raw.empty()) raw = to_json(qa).dump();
  debug_.push_back(TurnDebug{pending_elapsed_ms_ + ms_since(start), pending_, std::move(raw)});
  pending_.clear();
  advance();
}

Transcript Session::transcript() const {
  Transcript t;
  t.target = target_;
  t.turns = turns_;
  t.reconstructed = state_;
  t.termination = termination_.value_or(Termination::QuestionBudgetExhausted);
  t.question_count = turns_.size();
  t.debug = debug_;
  return t;
}

Transcript run_session(const Questioner& questioner, const Answerer& simulator,
                       const StructuredProfile& target, const SessionConfig& cfg) {
  Session session(questioner, target, cfg);
  while (!session.finished()) {
    const std::size_t turn = session.question_count();
    AnswerResult answer;
    try {
      answer = simulator.answer(session.pending_question(), session.target());
    } catch (const std::exception& e) {
      std::throw_with_nested(
          PolicyError("simulator failed at turn " + std::to_string(turn) + ": " + e.what(), turn));
    }
    Json raw = Json::object();
    raw["answer"] = answer.answer_text;
    raw["addressed"] = to_json(std::span<const Entry>(answer.addressed));
    raw["no_preference"] = answer.is_no_preference;
    session.submit(answer, raw.dump());
  }
  return session.transcript();
}

std::uint64_t session_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BatchResult run_batch(const Questioner& questioner, const Answerer& simulator,
                      std::span<const StructuredProfile> targets, const SessionConfig& cfg,
                      std::size_t parallelism) {
  if (targets.empty()) throw ValidationError("run_batch needs at least one target");
  cfg.validate();

  std::vector<std::optional<Transcript>> done(targets.size());
  std::vector<std::optional<std::string>> errors(targets.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++) {
      SessionConfig local = cfg;
      local.seed = session_seed(cfg.seed, i);
      try {
        done[i] = run_session(questioner, simulator, targets[i], local);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, targets.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  BatchResult result;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (done[i]) {
      result.transcripts.push_back(std::move(*done[i]));
    } else {
      result.failures.push_back(SessionFailure{i, targets[i].source_id(), errors[i].value_or("unknown")});
    }
  }
  return result;
}

}  // namespace elicit
