#pragma once

// Reconstruction scores (BLEU, ROUGE) and behavioural statistics over session
// transcripts.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/profile.hpp"

namespace elicit {

// Lower-cased runs of [A-Za-z0-9] (bytes >= 0x80 count as word characters).
std::vector<std::string> tokenize(std::string_view text);

// Orders 1..4 with uniform weights used by bleu().
inline constexpr std::size_t kBleuMaxOrder = 4;
// Numerator added to a zero n-gram match count.
inline constexpr double kBleuSmoothingEpsilon = 0.1;

// Sentence-level BLEU with brevity penalty. Orders run 1..min(4, |candidate|);
// an order with zero matches uses kBleuSmoothingEpsilon / (number of candidate
// n-grams). Returns 0 when the candidate is empty or shares no unigram with the
// reference, and 1 for identical non-empty token sequences.
double bleu(std::string_view candidate, std::string_view reference);

struct RougeScores {
  double rouge1_f = 0.0;
  double rougeL_f = 0.0;
};

// ROUGE-1 F1 (clipped unigram overlap) and ROUGE-L F1 (token LCS).
RougeScores rouge(std::string_view candidate, std::string_view reference);

struct PositionScore {
  std::size_t position = 0;  // questions asked so far
  double bleu = 0.0;
  double rouge1_f = 0.0;
  double rougeL_f = 0.0;
};

struct MetricsReport {
  std::size_t transcript_count = 0;
  std::size_t turn_count = 0;
  double bleu_mean = 0.0;
  double rouge1_f_mean = 0.0;
  // Headline ROUGE.
  double rougeL_f_mean = 0.0;
  double unanswered_rate = 0.0;
  double repetition_rate = 0.0;
  // Mean scores after each number of questions, 0..longest session. Sessions
  // that ended earlier contribute their final state.
  std::vector<PositionScore> per_position_scores;
  // Concept (tag, as first observed) -> weighted rank.
  std::map<std::string, double> weighted_ranks;
};

// Entries known after the first `k` turns: the final reconstruction minus the
// entries first introduced by turns k and later.
Entries prefix_entries(const Transcript& t, std::size_t k);

// Expected 1-based turn at which `concept` is first addressed, over the
// transcripts that address it: sum_i i * p(i). Throws ValidationError if the
// concept is never addressed.
double weighted_rank(std::span<const Transcript> transcripts, std::string_view concept_tag);

// No-preference turns / all turns. Throws ValidationError with zero turns.
double unanswered_rate(std::span<const Transcript> transcripts);

// Turns whose normalized question repeats an earlier question of the same
// transcript / all turns. Throws ValidationError with zero turns.
double repetition_rate(std::span<const Transcript> transcripts);

// Scores flatten_sorted(reconstructed) against flatten_sorted(target). Rates
// are reported as 0 for a batch without turns.
MetricsReport evaluate_run(std::span<const Transcript> transcripts);

}  // namespace elicit
