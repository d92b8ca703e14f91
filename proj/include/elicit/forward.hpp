#pragma once

// Forward process: structure a text profile, rank its tags by generality,
// generate funnel QA pairs, and derive the corruption chain and the two
// fine-tuning datasets from them.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/backends.hpp"
#include "elicit/profile.hpp"

namespace elicit {

// One Questioner fine-tuning row: given `input_state`, produce `target_question`.
struct TrainingExample {
  std::string source_id;
  std::size_t step = 0;
  PartialProfile input_state;
  std::string target_question;

  bool operator==(const TrainingExample&) const = default;
};

// One simulator fine-tuning row. The answer text is the chain-of-thought field,
// `target_addressed` the response mapping.
struct SimulatorExample {
  std::string source_id;
  std::string question;
  StructuredProfile full_profile;
  std::string target_answer;
  Entries target_addressed;

  bool operator==(const SimulatorExample&) const = default;
};

struct ForwardArtifacts {
  StructuredProfile profile;
  TagRanking ranking;
  std::vector<QAPair> funnel;
  std::vector<TrainingExample> questioner_rows;
  std::vector<SimulatorExample> simulator_rows;

  bool operator==(const ForwardArtifacts&) const = default;
};

struct ForwardBackends {
  const Structurer& structurer;
  const Ranker& ranker;
  const FunnelGenerator& generator;
};

struct ForwardConfig {
  std::string source_id;
  UpdateMode mode = UpdateMode::QuestionsAndAnswers;
};

StructuredProfile structure_profile(std::string_view text, const Structurer& structurer,
                                    const std::string& source_id = {});

TagRanking rank_tags(const StructuredProfile& profile, const Ranker& ranker);

std::vector<QAPair> generate_funnel(const StructuredProfile& profile, const TagRanking& ranking,
                                    const FunnelGenerator& generator);

// Throws ValidationError unless `ranking` is a permutation of the profile tags.
void validate_ranking(const StructuredProfile& profile, const TagRanking& ranking);

// Throws ValidationError unless: positions are 0..n-1 in order, every question
// is non-empty with a non-empty addressed set drawn from the profile, every
// profile entry is addressed, and the minimum rank addressed is nondecreasing.
void validate_funnel(const StructuredProfile& profile, const TagRanking& ranking,
                     std::span<const QAPair> funnel);

// State just before asking funnel[t]: the profile minus everything addressed by
// funnel[t..n-1], with funnel[0..t-1] as history. Requires 0 <= t <= n.
PartialProfile corrupt(const StructuredProfile& profile, std::span<const QAPair> funnel,
                       std::size_t t, UpdateMode mode = UpdateMode::QuestionsAndAnswers);

// n rows, emitted for t = n-1 down to 0.
std::vector<TrainingExample> build_questioner_dataset(
    const StructuredProfile& profile, std::span<const QAPair> funnel,
    UpdateMode mode = UpdateMode::QuestionsAndAnswers);

// n rows in the same descending order, each carrying the full profile.
std::vector<SimulatorExample> build_simulator_dataset(const StructuredProfile& profile,
                                                      std::span<const QAPair> funnel);

// structure -> rank -> funnel -> datasets. Failures surface as StageError
// labelled structure, rank, funnel or datasets.
ForwardArtifacts run_forward(std::string_view text, const ForwardBackends& backends,
                             const ForwardConfig& config);

}  // namespace elicit
