#pragma once

// Profile domain types and the deterministic state-transition primitives the
// forward process, session engine and metrics all share.
//
// A profile is an ordered list of (tag, content) entries. Order is significant
// for storage and rendering (it carries the generality ranking once ranked) but
// not for equality, which compares normalized entry sets.

#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

struct Entry {
  std::string tag;
  std::string content;

  bool operator==(const Entry&) const = default;
};

using Entries = std::vector<Entry>;

// Normalized identity of an entry: normalize(tag) + '\x1f' + normalize(content).
std::string entry_key(const Entry& e);

// True when both entries have the same normalized tag and content.
bool same_entry(const Entry& a, const Entry& b);

// Full user profile. Construction validates: tags unique (case-insensitive
// after normalization), no empty tag or content after trimming.
class StructuredProfile {
 public:
  StructuredProfile() = default;
  StructuredProfile(std::string source_id, Entries entries);

  const std::string& source_id() const noexcept { return source_id_; }
  const Entries& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Lookup by normalized tag; nullptr when absent.
  const Entry* find(std::string_view tag) const;
  bool contains(const Entry& e) const;

  bool operator==(const StructuredProfile&) const = default;

 private:
  std::string source_id_;
  Entries entries_;
};

// Throws ProfileError when `entries` break the StructuredProfile invariants.
void validate_entries(std::span<const Entry> entries);

enum class UpdateMode { AnswersOnly, QuestionsAndAnswers };

std::string_view to_string(UpdateMode m);
UpdateMode parse_update_mode(std::string_view s);

// One question-answer turn plus the profile entries it addresses.
struct QAPair {
  std::string question;
  std::string answer;
  Entries addressed;
  std::size_t position = 0;

  bool is_no_preference() const noexcept { return addressed.empty(); }
  bool operator==(const QAPair&) const = default;
};

// A corruption / reconstruction state: the entries known so far and the turns
// that produced them. History is always retained; `mode` decides whether the
// question text is shown to a Questioner.
struct PartialProfile {
  Entries entries;
  std::vector<QAPair> history;
  UpdateMode mode = UpdateMode::QuestionsAndAnswers;

  bool operator==(const PartialProfile&) const = default;
};

PartialProfile empty_state(UpdateMode mode = UpdateMode::QuestionsAndAnswers);

enum class Termination { ProfileMatch, QuestionBudgetExhausted };

std::string_view to_string(Termination t);
Termination parse_termination(std::string_view s);

// Forensics for one session turn. Never serialized with the transcript itself.
struct TurnDebug {
  double elapsed_ms = 0.0;
  std::string questioner_output;
  std::string simulator_output;
};

struct Transcript {
  StructuredProfile target;
  std::vector<QAPair> turns;
  PartialProfile reconstructed;
  Termination termination = Termination::QuestionBudgetExhausted;
  std::size_t question_count = 0;
  std::vector<TurnDebug> debug;
};

inline std::span<const Entry> entries_of(const StructuredProfile& p) { return p.entries(); }
inline std::span<const Entry> entries_of(const PartialProfile& p) { return p.entries; }
inline std::span<const Entry> entries_of(const Entries& e) { return e; }

template <typename P>
concept ProfileLike = requires(const P& p) {
  { entries_of(p) } -> std::convertible_to<std::span<const Entry>>;
};

// Returns `state` extended by `qa`: history gains `qa`, entries gain every
// addressed pair not already present. Pure; the input is not modified.
// Throws ProfileError for an empty question and InconsistentAnswerError when an
// addressed pair reuses a present tag with different content.
PartialProfile apply_transition(const PartialProfile& state, const QAPair& qa);

// Canonical text: one `tag: content` line per entry in stored order.
std::string flatten_profile(std::span<const Entry> entries);
template <ProfileLike P>
std::string flatten_profile(const P& p) {
  return flatten_profile(entries_of(p));
}

// Same lines as flatten_profile, sorted lexicographically. Scoring text.
std::string flatten_sorted(std::span<const Entry> entries);
template <ProfileLike P>
std::string flatten_sorted(const P& p) {
  return flatten_sorted(entries_of(p));
}

// Set equality over normalized (tag, content) pairs.
bool profiles_equal(std::span<const Entry> a, std::span<const Entry> b);
template <ProfileLike A, ProfileLike B>
bool profiles_equal(const A& a, const B& b) {
  return profiles_equal(entries_of(a), entries_of(b));
}

// True when every entry of `sub` is present in `super` (normalized).
bool entries_subset(std::span<const Entry> sub, std::span<const Entry> super);

}  // namespace elicit
