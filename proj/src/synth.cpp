#include "elicit/synth.hpp"

#include <random>
#include <unordered_set>

#include "elicit/backends.hpp"
#include "elicit/errors.hpp"
#include "elicit/text.hpp"

namespace elicit {
namespace {

const std::map<std::string, ContentTemplate>& default_templates() {
  static const std::map<std::string, ContentTemplate> templates = {
      {"Genre", {"The user likes {} movies",
                 {"action", "comedy", "drama", "horror", "science fiction", "romance", "thriller",
                  "animated", "documentary", "western"}}},
      {"Film Era", {"The user prefers films from the {} era",
                    {"silent", "golden age", "new hollywood", "blockbuster", "modern", "streaming"}}},
      {"Decade", {"The user mostly watches movies from the {}",
                  {"1950s", "1960s", "1970s", "1980s", "1990s", "2000s", "2010s"}}},
      {"Directors", {"The user enjoys films directed by {}",
                     {"Christopher Nolan", "Steven Spielberg", "Greta Gerwig", "Akira Kurosawa",
                      "Denis Villeneuve", "Sofia Coppola", "Quentin Tarantino", "Hayao Miyazaki"}}},
      {"Visual Style", {"The user appreciates {} visuals",
                        {"colorful", "minimalist", "gritty", "noir", "dreamlike", "handheld",
                         "symmetrical"}}},
      {"Tone", {"The user prefers a {} tone",
                {"lighthearted", "dark", "melancholic", "uplifting", "suspenseful", "satirical"}}},
      {"Special Effects", {"The user values {} special effects",
                           {"practical", "CGI heavy", "stop motion", "subtle", "groundbreaking"}}},
      {"Humor", {"The user enjoys {} humor",
                 {"slapstick", "dry", "absurd", "witty", "dark", "parody"}}},
      {"Atmosphere", {"The user likes a {} atmosphere",
                      {"cozy", "eerie", "tense", "nostalgic", "epic", "intimate"}}},
  };
  return templates;
}

std::string fill(const ContentTemplate& tpl, const std::string& value) {
  std::string out = tpl.pattern;
  if (std::size_t pos = out.find("{}"); pos != std::string::npos) {
    out.replace(pos, 2, value);
  } else {
    out += " " + value;
  }
  return out;
}

}  // namespace

SyntheticProfileSpec SyntheticProfileSpec::defaults() {
  SyntheticProfileSpec spec;
  spec.vocabulary = generality_lexicon();
  spec.templates = default_templates();
  return spec;
}

void SyntheticProfileSpec::validate() const {
  if (vocabulary.empty()) throw ConfigError("synthetic vocabulary is empty");
  std::unordered_set<std::string> seen;
  for (const std::string& tag : vocabulary) {
    if (trim(tag).empty()) throw ConfigError("synthetic vocabulary has an empty tag");
    if (!seen.insert(normalize_text(tag)).second) {
      throw ConfigError("synthetic vocabulary repeats '" + tag + "'");
    }
  }
  if (min_tags < 1) throw ConfigError("tags-per-profile minimum must be >= 1");
  if (min_tags > max_tags) throw ConfigError("tags-per-profile minimum exceeds maximum");
  if (max_tags > vocabulary.size()) {
    throw ConfigError("tags-per-profile maximum " + std::to_string(max_tags) +
                      " exceeds the vocabulary size " + std::to_string(vocabulary.size()));
  }
}

std::vector<StructuredProfile> synth_profiles(const SyntheticProfileSpec& spec, std::size_t count) {
  spec.validate();
  if (count < 1) throw ConfigError("synthetic profile count must be >= 1");

  std::mt19937_64 rng(spec.seed);
  std::vector<StructuredProfile> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = spec.min_tags + uniform_index(rng, spec.max_tags - spec.min_tags + 1);
    // partial Fisher-Yates: the first k slots are a random ordered subset
    std::vector<std::string> tags = spec.vocabulary;
    for (std::size_t j = 0; j < k; ++j) {
      std::swap(tags[j], tags[j + uniform_index(rng, tags.size() - j)]);
    }
    Entries entries;
    for (std::size_t j = 0; j < k; ++j) {
      const std::string& tag = tags[j];
      auto it = spec.templates.find(tag);
      ContentTemplate generic{"The user has a preference for {} " + to_lower(tag),
                              {"classic", "modern", "subtle", "bold", "unusual"}};
      const ContentTemplate& tpl = it != spec.templates.end() ? it->second : generic;
      if (tpl.values.empty()) throw ConfigError("content template for '" + tag + "' has no values");
      const std::size_t first = uniform_index(rng, tpl.values.size());
      std::string value = tpl.values[first];
      if (tpl.values.size() > 1 && uniform_index(rng, 3) == 0) {
        std::size_t second = uniform_index(rng, tpl.values.size() - 1);
        if (second >= first) ++second;
        value += " and " + tpl.values[second];
      }
      entries.push_back(Entry{tag, fill(tpl, value)});
    }
    out.emplace_back("synth-" + std::to_string(spec.seed) + "-" + std::to_string(i), std::move(entries));
  }
  return out;
}

}  // namespace elicit
