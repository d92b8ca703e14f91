#pragma once

// Seeded synthetic movie-preference profiles for closed-loop runs.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "elicit/profile.hpp"

namespace elicit {

// Content for a tag: `pattern` with "{}" replaced by one or two values joined
// with " and ".
struct ContentTemplate {
  std::string pattern;
  std::vector<std::string> values;
};

struct SyntheticProfileSpec {
  // Defaults to the generality lexicon.
  std::vector<std::string> vocabulary;
  std::size_t min_tags = 3;
  std::size_t max_tags = 9;
  // Tags without a template use a generic one.
  std::map<std::string, ContentTemplate> templates;
  std::uint64_t seed = 1;

  static SyntheticProfileSpec defaults();
  // Throws ConfigError unless 1 <= min_tags <= max_tags <= vocabulary size and
  // the vocabulary has no duplicates.
  void validate() const;
};

// Deterministic in spec.seed. Tags appear in random order; source ids are
// "synth-<seed>-<index>".
std::vector<StructuredProfile> synth_profiles(const SyntheticProfileSpec& spec, std::size_t count);

}  // namespace elicit
