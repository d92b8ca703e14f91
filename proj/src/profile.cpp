#include "elicit/profile.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "elicit/errors.hpp"
#include "elicit/text.hpp"

namespace elicit {

std::string entry_key(const Entry& e) {
  return normalize_text(e.tag) + '\x1f' + normalize_text(e.content);
}

bool same_entry(const Entry& a, const Entry& b) {
  return normalize_text(a.tag) == normalize_text(b.tag) &&
         normalize_text(a.content) == normalize_text(b.content);
}

void validate_entries(std::span<const Entry> entries) {
  std::unordered_set<std::string> seen;
  for (const Entry& e : entries) {
    std::string tag = normalize_text(e.tag);
    if (tag.empty()) throw ProfileError("profile entry has an empty tag");
    if (trim(e.content).empty()) {
      throw ProfileError("profile entry '" + e.tag + "' has empty content");
    }
    if (!seen.insert(tag).second) {
      throw ProfileError("duplicate profile tag '" + e.tag + "'");
    }
  }
}

StructuredProfile::StructuredProfile(std::string source_id, Entries entries)
    : source_id_(std::move(source_id)), entries_(std::move(entries)) {
  for (Entry& e : entries_) {
    e.tag = trim(e.tag);
    e.content = trim(e.content);
  }
  validate_entries(entries_);
}

const Entry* StructuredProfile::find(std::string_view tag) const {
  const std::string key = normalize_text(tag);
  for (const Entry& e : entries_) {
    if (normalize_text(e.tag) == key) return &e;
  }
  return nullptr;
}

bool StructuredProfile::contains(const Entry& e) const {
  const Entry* hit = find(e.tag);
  return hit != nullptr && normalize_text(hit->content) == normalize_text(e.content);
}

std::string_view to_string(UpdateMode m) {
  switch (m) {
    case UpdateMode::AnswersOnly: return "AnswersOnly";
    case UpdateMode::QuestionsAndAnswers: return "QuestionsAndAnswers";
  }
  return "QuestionsAndAnswers";
}

UpdateMode parse_update_mode(std::string_view s) {
  if (s == "AnswersOnly") return UpdateMode::AnswersOnly;
  if (s == "QuestionsAndAnswers") return UpdateMode::QuestionsAndAnswers;
  throw ConfigError("unknown update mode '" + std::string(s) +
                    "' (expected AnswersOnly or QuestionsAndAnswers)");
}

PartialProfile empty_state(UpdateMode mode) {
  PartialProfile p;
  p.mode = mode;
  return p;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ProfileMatch: return "ProfileMatch";
    case Termination::QuestionBudgetExhausted: return "QuestionBudgetExhausted";
  }
  return "QuestionBudgetExhausted";
}

Termination parse_termination(std::string_view s) {
  if (s == "ProfileMatch") return Termination::ProfileMatch;
  if (s == "QuestionBudgetExhausted") return Termination::QuestionBudgetExhausted;
  throw ValidationError("unknown termination '" + std::string(s) + "'");
}

PartialProfile apply_transition(const PartialProfile& state, const QAPair& qa) {
  if (trim(qa.question).empty()) {
    throw ProfileError("transition requires a non-empty question");
  }
  PartialProfile next = state;

  // normalized tag -> normalized content of everything known so far
  std::unordered_map<std::string, std::string> known;
  for (const Entry& e : next.entries) {
    known.emplace(normalize_text(e.tag), normalize_text(e.content));
  }
  for (const Entry& e : qa.addressed) {
    std::string tag = normalize_text(e.tag);
    std::string content = normalize_text(e.content);
    auto it = known.find(tag);
    if (it == known.end()) {
      known.emplace(std::move(tag), std::move(content));
      next.entries.push_back(e);
    } else if (it->second != content) {
      throw InconsistentAnswerError("answer to '" + qa.question + "' gives tag '" + e.tag +
                                    "' content '" + e.content +
                                    "' which conflicts with the known content");
    }
  }
  next.history.push_back(qa);
  return next;
}

std::string flatten_profile(std::span<const Entry> entries) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i != 0) out.push_back('\n');
    out += entries[i].tag;
    out += ": ";
    out += entries[i].content;
  }
  return out;
}

std::string flatten_sorted(std::span<const Entry> entries) {
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const Entry& e : entries) lines.push_back(e.tag + ": " + e.content);
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i != 0) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

bool profiles_equal(std::span<const Entry> a, std::span<const Entry> b) {
  std::set<std::string> ka;
  std::set<std::string> kb;
  for (const Entry& e : a) ka.insert(entry_key(e));
  for (const Entry& e : b) kb.insert(entry_key(e));
  return ka == kb;
}

bool entries_subset(std::span<const Entry> sub, std::span<const Entry> super) {
  std::unordered_set<std::string> keys;
  for (const Entry& e : super) keys.insert(entry_key(e));
  return std::all_of(sub.begin(), sub.end(),
                     [&](const Entry& e) { return keys.count(entry_key(e)) != 0; });
}

}  // namespace elicit
