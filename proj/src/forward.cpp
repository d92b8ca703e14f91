#include "elicit/forward.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "elicit/errors.hpp"
#include "elicit/text.hpp"

namespace elicit {

StructuredProfile structure_profile(std::string_view text, const Structurer& structurer,
                                    const std::string& source_id) {
  if (trim(text).empty()) throw ValidationError("profile text is empty");
  StructuredProfile profile = structurer.structure(text, source_id);
  if (profile.empty()) throw ValidationError("structurer extracted no entries");
  return profile;
}

void validate_ranking(const StructuredProfile& profile, const TagRanking& ranking) {
  std::unordered_set<std::string> expected;
  for (const Entry& e : profile.entries()) expected.insert(normalize_text(e.tag));
  std::unordered_set<std::string> seen;
  for (const std::string& tag : ranking.tags) {
    std::string key = normalize_text(tag);
    if (expected.count(key) == 0) {
      throw ValidationError("ranking contains tag '" + tag + "' not in the profile");
    }
    if (!seen.insert(key).second) {
      throw ValidationError("ranking repeats tag '" + tag + "'");
    }
  }
  if (seen.size() != expected.size()) {
    throw ValidationError("ranking is missing " + std::to_string(expected.size() - seen.size()) +
                          " profile tag(s)");
  }
}

TagRanking rank_tags(const StructuredProfile& profile, const Ranker& ranker) {
  if (profile.empty()) throw ValidationError("cannot rank an empty profile");
  TagRanking ranking = ranker.rank(profile);
  validate_ranking(profile, ranking);
  return ranking;
}

void validate_funnel(const StructuredProfile& profile, const TagRanking& ranking,
                     std::span<const QAPair> funnel) {
  std::unordered_map<std::string, std::size_t> rank_of;
  for (std::size_t i = 0; i < ranking.tags.size(); ++i) {
    rank_of.emplace(normalize_text(ranking.tags[i]), i);
  }
  std::unordered_set<std::string> covered;
  std::size_t previous_min_rank = 0;
  for (std::size_t i = 0; i < funnel.size(); ++i) {
    const QAPair& qa = funnel[i];
    const std::string where = "funnel question " + std::to_string(i);
    if (qa.position != i) {
      throw ValidationError(where + " has position " + std::to_string(qa.position));
    }
    if (trim(qa.question).empty()) throw ValidationError(where + " is empty");
    if (qa.addressed.empty()) throw ValidationError(where + " addresses no profile entry");
    std::size_t min_rank = std::numeric_limits<std::size_t>::max();
    for (const Entry& e : qa.addressed) {
      if (!profile.contains(e)) {
        throw ValidationError(where + " addresses '" + e.tag + "' which is not a profile entry");
      }
      covered.insert(entry_key(e));
      auto it = rank_of.find(normalize_text(e.tag));
      if (it != rank_of.end()) min_rank = std::min(min_rank, it->second);
    }
    if (i > 0 && min_rank < previous_min_rank) {
      throw ValidationError(where + " breaks funnel order (asks a more general tag late)");
    }
    previous_min_rank = min_rank;
  }
  for (const Entry& e : profile.entries()) {
    if (covered.count(entry_key(e)) == 0) {
      throw ValidationError("coverage gap: no question addresses '" + e.tag + "'");
    }
  }
}

std::vector<QAPair> generate_funnel(const StructuredProfile& profile, const TagRanking& ranking,
                                    const FunnelGenerator& generator) {
  validate_ranking(profile, ranking);
  std::vector<QAPair> funnel = generator.generate(profile, ranking);
  validate_funnel(profile, ranking, funnel);
  return funnel;
}

PartialProfile corrupt(const StructuredProfile& profile, std::span<const QAPair> funnel,
                       std::size_t t, UpdateMode mode) {
  if (t > funnel.size()) {
    throw ValidationError("corruption step " + std::to_string(t) + " outside 0.." +
                          std::to_string(funnel.size()));
  }
  std::unordered_set<std::string> removed;
  for (std::size_t i = t; i < funnel.size(); ++i) {
    for (const Entry& e : funnel[i].addressed) removed.insert(entry_key(e));
  }
  PartialProfile state = empty_state(mode);
  for (const Entry& e : profile.entries()) {
    if (removed.count(entry_key(e)) == 0) state.entries.push_back(e);
  }
  state.history.assign(funnel.begin(), funnel.begin() + static_cast<std::ptrdiff_t>(t));
  return state;
}

std::vector<TrainingExample> build_questioner_dataset(const StructuredProfile& profile,
                                                      std::span<const QAPair> funnel,
                                                      UpdateMode mode) {
  std::vector<TrainingExample> rows;
  rows.reserve(funnel.size());
  for (std::size_t t = funnel.size(); t-- > 0;) {
    rows.push_back(TrainingExample{profile.source_id(), t, corrupt(profile, funnel, t, mode),
                                   funnel[t].question});
  }
  return rows;
}

std::vector<SimulatorExample> build_simulator_dataset(const StructuredProfile& profile,
                                                      std::span<const QAPair> funnel) {
  std::vector<SimulatorExample> rows;
  rows.reserve(funnel.size());
  for (std::size_t i = funnel.size(); i-- > 0;) {
    rows.push_back(SimulatorExample{profile.source_id(), funnel[i].question, profile,
                                    funnel[i].answer, funnel[i].addressed});
  }
  return rows;
}

namespace {

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    // the original error stays reachable through std::rethrow_if_nested
    std::throw_with_nested(StageError(stage, e.what()));
  }
}

}  // namespace

ForwardArtifacts run_forward(std::string_view text, const ForwardBackends& backends,
                             const ForwardConfig& config) {
  ForwardArtifacts out;
  out.profile = in_stage("structure", [&] {
    return structure_profile(text, backends.structurer, config.source_id);
  });
  out.ranking = in_stage("rank", [&] { return rank_tags(out.profile, backends.ranker); });
  out.funnel = in_stage("funnel", [&] {
    return generate_funnel(out.profile, out.ranking, backends.generator);
  });
  in_stage("datasets", [&] {
    out.questioner_rows = build_questioner_dataset(out.profile, out.funnel, config.mode);
    out.simulator_rows = build_simulator_dataset(out.profile, out.funnel);
  });
  return out;
}

}  // namespace elicit
