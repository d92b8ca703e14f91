#include "elicit/backends.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "elicit/errors.hpp"
#include "elicit/text.hpp"

namespace elicit {
namespace {

constexpr std::string_view kTemplatePrefix = "What is your preferred ";

std::string strip_answer_punctuation(std::string s) {
  // curly apostrophe -> ASCII
  for (std::size_t pos; (pos = s.find("\xE2\x80\x99")) != std::string::npos;) {
    s.replace(pos, 3, "'");
  }
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == ',')) s.pop_back();
  return s;
}

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || static_cast<unsigned char>(c) >= 0x80;
}

// Whole-word occurrence of `needle` in `haystack` (both normalized).
bool contains_phrase(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + 1)) {
    bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    std::size_t end = pos + needle.size();
    bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

// Tag the question is about: the template tag when present, otherwise the
// longest profile tag mentioned in the question.
const Entry* entry_for_question(std::string_view question, const StructuredProfile& profile) {
  std::string tag = question_template_tag(question);
  if (!tag.empty()) return profile.find(tag);
  const std::string q = normalize_text(question);
  const Entry* best = nullptr;
  std::size_t best_len = 0;
  for (const Entry& e : profile.entries()) {
    std::string t = normalize_text(e.tag);
    if (t.size() > best_len && contains_phrase(q, t)) {
      best = &e;
      best_len = t.size();
    }
  }
  return best;
}

}  // namespace

bool is_no_preference_text(std::string_view answer) {
  static const std::unordered_set<std::string> phrases = {
      "no preference", "no preferences", "i don't know", "i dont know", "i do not know",
      "don't know",    "dont know",      "idk",          "no idea",      "i have no preference",
  };
  return phrases.count(strip_answer_punctuation(normalize_text(answer))) != 0;
}

AnswerResult AnswerResult::no_preference() {
  return AnswerResult{std::string(kNoPreference), {}, true};
}

const std::vector<std::string>& generality_lexicon() {
  static const std::vector<std::string> lexicon = {
      "Genre", "Film Era", "Decade", "Directors", "Visual Style",
      "Tone",  "Special Effects", "Humor", "Atmosphere",
  };
  return lexicon;
}

std::string oracle_question_for(std::string_view tag) {
  return std::string(kTemplatePrefix) + std::string(tag) + "?";
}

std::string question_template_tag(std::string_view question) {
  std::string q = trim(question);
  if (q.size() <= kTemplatePrefix.size() + 1 || q.back() != '?') return {};
  if (!iequals(std::string_view(q).substr(0, kTemplatePrefix.size()), kTemplatePrefix)) return {};
  return trim(std::string_view(q).substr(kTemplatePrefix.size(),
                                         q.size() - kTemplatePrefix.size() - 1));
}

StructuredProfile oracle_structure(std::string_view text, const std::string& source_id) {
  Entries entries;
  std::unordered_set<std::string> seen;
  for (const std::string& line : split_lines(text)) {
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string tag = trim(std::string_view(line).substr(0, colon));
    std::string content = trim(std::string_view(line).substr(colon + 1));
    if (tag.empty() || content.empty()) continue;
    if (!seen.insert(normalize_text(tag)).second) {
      throw ProfileError("duplicate tag '" + tag + "' in profile text");
    }
    entries.push_back(Entry{std::move(tag), std::move(content)});
  }
  if (entries.empty()) throw ProfileError("empty extraction: no `tag: content` lines found");
  return StructuredProfile(source_id, std::move(entries));
}

TagRanking oracle_rank(const StructuredProfile& profile) {
  std::unordered_map<std::string, std::size_t> lexicon_rank;
  const auto& lexicon = generality_lexicon();
  for (std::size_t i = 0; i < lexicon.size(); ++i) lexicon_rank.emplace(normalize_text(lexicon[i]), i);

  struct Keyed {
    std::size_t rank;
    std::string norm;
    std::string tag;
  };
  std::vector<Keyed> keyed;
  for (const Entry& e : profile.entries()) {
    std::string norm = normalize_text(e.tag);
    auto it = lexicon_rank.find(norm);
    keyed.push_back({it == lexicon_rank.end() ? lexicon.size() : it->second, std::move(norm), e.tag});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.tag < b.tag;
  });
  TagRanking ranking;
  for (Keyed& k : keyed) ranking.tags.push_back(std::move(k.tag));
  return ranking;
}

std::vector<QAPair> oracle_funnel(const StructuredProfile& profile, const TagRanking& ranking) {
  std::vector<QAPair> funnel;
  for (const std::string& tag : ranking.tags) {
    const Entry* e = profile.find(tag);
    if (e == nullptr) throw ValidationError("ranked tag '" + tag + "' not in profile");
    funnel.push_back(QAPair{oracle_question_for(e->tag), e->content, {*e}, funnel.size()});
  }
  return funnel;
}

AnswerResult oracle_answer(std::string_view question, const StructuredProfile& full_profile) {
  const Entry* e = entry_for_question(question, full_profile);
  if (e == nullptr) return AnswerResult::no_preference();
  return AnswerResult{e->content, {*e}, false};
}

std::vector<std::string> visible_questions(const PartialProfile& state) {
  std::vector<std::string> out;
  if (state.mode != UpdateMode::QuestionsAndAnswers) return out;
  for (const QAPair& qa : state.history) out.push_back(qa.question);
  return out;
}

std::string oracle_generate_question(const PartialProfile& state, const StructuredProfile& full,
                                     const TagRanking& ranking) {
  std::unordered_set<std::string> present;
  for (const Entry& e : state.entries) present.insert(normalize_text(e.tag));
  std::unordered_set<std::string> asked;
  for (const std::string& q : visible_questions(state)) {
    const Entry* e = entry_for_question(q, full);
    if (e != nullptr) asked.insert(normalize_text(e->tag));
  }

  const std::string* fallback = nullptr;
  for (const std::string& tag : ranking.tags) {
    if (full.find(tag) == nullptr) continue;
    std::string key = normalize_text(tag);
    if (present.count(key) != 0) continue;
    if (asked.count(key) == 0) return oracle_question_for(tag);
    if (fallback == nullptr) fallback = &tag;
  }
  // Every absent tag was already asked and declined; re-ask the most general.
  if (fallback != nullptr) return oracle_question_for(*fallback);
  throw ValidationError("profile complete: no absent tag left to ask about");
}

StructuredProfile OracleStructurer::structure(std::string_view text,
                                              const std::string& source_id) const {
  return oracle_structure(text, source_id);
}

TagRanking OracleRanker::rank(const StructuredProfile& profile) const {
  return oracle_rank(profile);
}

std::vector<QAPair> OracleFunnelGenerator::generate(const StructuredProfile& profile,
                                                    const TagRanking& ranking) const {
  return oracle_funnel(profile, ranking);
}

std::string OracleQuestioner::next_question(const QuestionContext& ctx) const {
  return oracle_generate_question(ctx.state, ctx.target, oracle_rank(ctx.target));
}

AnswerResult OracleAnswerer::answer(std::string_view question,
                                    const StructuredProfile& profile) const {
  return oracle_answer(question, profile);
}

AnswerResult OracleAnswerInterpreter::interpret(std::string_view question, std::string_view reply,
                                                const StructuredProfile& target) const {
  if (trim(reply).empty() || is_no_preference_text(reply)) return AnswerResult::no_preference();
  const std::string wanted = normalize_text(reply);
  const std::string asked_tag = normalize_text(question_template_tag(question));
  const Entry* match = nullptr;
  for (const Entry& e : target.entries()) {
    if (normalize_text(e.content) != wanted) continue;
    if (match == nullptr || normalize_text(e.tag) == asked_tag) match = &e;
  }
  if (match == nullptr) return AnswerResult::no_preference();
  return AnswerResult{trim(reply), {*match}, false};
}

StochasticTemplateQuestioner::StochasticTemplateQuestioner(std::vector<std::string> vocabulary)
    : vocabulary_(std::move(vocabulary)) {
  if (vocabulary_.empty()) throw ConfigError("stochastic questioner needs a non-empty vocabulary");
}

std::string StochasticTemplateQuestioner::next_question(const QuestionContext& ctx) const {
  std::unordered_set<std::string> seen;
  for (const std::string& q : visible_questions(ctx.state)) seen.insert(normalize_text(q));
  std::vector<std::string> candidates;
  for (const std::string& tag : vocabulary_) {
    std::string q = oracle_question_for(tag);
    if (seen.count(normalize_text(q)) == 0) candidates.push_back(std::move(q));
  }
  if (candidates.empty()) {
    for (const std::string& tag : vocabulary_) candidates.push_back(oracle_question_for(tag));
  }
  return candidates[uniform_index(ctx.rng, candidates.size())];
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
  const std::uint64_t range = n;
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t x = rng();
  while (x < threshold) x = rng();
  return static_cast<std::size_t>(x % range);
}

}  // namespace elicit
