#include "elicit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "elicit/errors.hpp"
#include "elicit/text.hpp"

namespace elicit {
namespace {

bool is_token_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t clipped_matches(const NgramCounts& cand, const NgramCounts& ref) {
  std::size_t total = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) total += std::min(count, it->second);
  }
  return total;
}

double f1(double overlap, std::size_t cand_len, std::size_t ref_len) {
  if (overlap <= 0.0 || cand_len == 0 || ref_len == 0) return 0.0;
  const double p = overlap / static_cast<double>(cand_len);
  const double r = overlap / static_cast<double>(ref_len);
  return 2.0 * p * r / (p + r);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

// First 1-based turn addressing each concept, keyed by normalized tag.
std::unordered_map<std::string, std::size_t> first_positions(const Transcript& t) {
  std::unordered_map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    for (const Entry& e : t.turns[i].addressed) first.emplace(normalize_text(e.tag), i + 1);
  }
  return first;
}

std::size_t total_turns(std::span<const Transcript> transcripts) {
  std::size_t n = 0;
  for (const Transcript& t : transcripts) n += t.turns.size();
  return n;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double bleu(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  if (cand.empty()) return 0.0;

  const std::size_t max_order = std::min(kBleuMaxOrder, cand.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_order; ++n) {
    const std::size_t matches = clipped_matches(ngram_counts(cand, n), ngram_counts(ref, n));
    const auto denom = static_cast<double>(cand.size() - n + 1);
    if (matches == 0) {
      if (n == 1) return 0.0;
      log_sum += std::log(kBleuSmoothingEpsilon / denom);
    } else {
      log_sum += std::log(static_cast<double>(matches) / denom);
    }
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_sum / static_cast<double>(max_order));
}

RougeScores rouge(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  RougeScores s;
  const auto overlap = static_cast<double>(clipped_matches(ngram_counts(cand, 1), ngram_counts(ref, 1)));
  s.rouge1_f = f1(overlap, cand.size(), ref.size());
  s.rougeL_f = f1(static_cast<double>(lcs_length(cand, ref)), cand.size(), ref.size());
  return s;
}

Entries prefix_entries(const Transcript& t, std::size_t k) {
  std::unordered_set<std::string> later;  // first introduced at turn >= k
  std::unordered_set<std::string> earlier;
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    for (const Entry& e : t.turns[i].addressed) {
      std::string key = entry_key(e);
      if (i < k) {
        earlier.insert(key);
        later.erase(key);
      } else if (earlier.count(key) == 0) {
        later.insert(std::move(key));
      }
    }
  }
  Entries out;
  for (const Entry& e : t.reconstructed.entries) {
    if (later.count(entry_key(e)) == 0) out.push_back(e);
  }
  return out;
}

double weighted_rank(std::span<const Transcript> transcripts, std::string_view concept_tag) {
  const std::string key = normalize_text(concept_tag);
  std::map<std::size_t, std::size_t> histogram;  // position -> occurrences
  std::size_t occurrences = 0;
  for (const Transcript& t : transcripts) {
    const auto first = first_positions(t);
    if (auto it = first.find(key); it != first.end()) {
      ++histogram[it->second];
      ++occurrences;
    }
  }
  if (occurrences == 0) {
    throw ValidationError("concept '" + std::string(concept_tag) + "' is never addressed");
  }
  double wr = 0.0;
  for (const auto& [position, count] : histogram) {
    const double p = static_cast<double>(count) / static_cast<double>(occurrences);
    wr += static_cast<double>(position) * p;
  }
  return wr;
}

double unanswered_rate(std::span<const Transcript> transcripts) {
  const std::size_t total = total_turns(transcripts);
  if (total == 0) throw ValidationError("unanswered_rate over zero turns");
  std::size_t unanswered = 0;
  for (const Transcript& t : transcripts) {
    for (const QAPair& qa : t.turns) unanswered += qa.is_no_preference() ? 1 : 0;
  }
  return static_cast<double>(unanswered) / static_cast<double>(total);
}

double repetition_rate(std::span<const Transcript> transcripts) {
  const std::size_t total = total_turns(transcripts);
  if (total == 0) throw ValidationError("repetition_rate over zero turns");
  std::size_t repeated = 0;
  for (const Transcript& t : transcripts) {
    std::unordered_set<std::string> seen;
    for (const QAPair& qa : t.turns) {
      if (!seen.insert(normalize_text(qa.question)).second) ++repeated;
    }
  }
  return static_cast<double>(repeated) / static_cast<double>(total);
}

MetricsReport evaluate_run(std::span<const Transcript> transcripts) {
  if (transcripts.empty()) throw ValidationError("evaluate_run needs at least one transcript");
  MetricsReport report;
  report.transcript_count = transcripts.size();
  report.turn_count = total_turns(transcripts);
  const auto count = static_cast<double>(transcripts.size());

  std::size_t longest = 0;
  for (const Transcript& t : transcripts) {
    const std::string cand = flatten_sorted(t.reconstructed);
    const std::string ref = flatten_sorted(t.target);
    report.bleu_mean += bleu(cand, ref);
    const RougeScores r = rouge(cand, ref);
    report.rouge1_f_mean += r.rouge1_f;
    report.rougeL_f_mean += r.rougeL_f;
    longest = std::max(longest, t.turns.size());
  }
  report.bleu_mean /= count;
  report.rouge1_f_mean /= count;
  report.rougeL_f_mean /= count;

  for (std::size_t k = 0; k <= longest; ++k) {
    PositionScore ps;
    ps.position = k;
    for (const Transcript& t : transcripts) {
      const std::string cand = flatten_sorted(prefix_entries(t, std::min(k, t.turns.size())));
      const std::string ref = flatten_sorted(t.target);
      ps.bleu += bleu(cand, ref);
      const RougeScores r = rouge(cand, ref);
      ps.rouge1_f += r.rouge1_f;
      ps.rougeL_f += r.rougeL_f;
    }
    ps.bleu /= count;
    ps.rouge1_f /= count;
    ps.rougeL_f /= count;
    report.per_position_scores.push_back(ps);
  }

  if (report.turn_count > 0) {
    report.unanswered_rate = unanswered_rate(transcripts);
    report.repetition_rate = repetition_rate(transcripts);
  }

  std::map<std::string, std::string> display;  // normalized -> first spelling seen
  for (const Transcript& t : transcripts) {
    for (const QAPair& qa : t.turns) {
      for (const Entry& e : qa.addressed) display.emplace(normalize_text(e.tag), e.tag);
    }
  }
  for (const auto& [norm, tag] : display) {
    report.weighted_ranks[tag] = weighted_rank(transcripts, norm);
  }
  return report;
}

}  // namespace elicit
