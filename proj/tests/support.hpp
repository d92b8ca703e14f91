#pragma once

// Test helpers: independent reference computations ("oracles") that share no
// code with the library, a scratch-directory guard and a scriptable
// chat-completions stub.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "elicit/profile.hpp"

namespace testing {

// ---------------------------------------------------------------------------
// Oracles

inline std::string norm(const std::string& s) {
  std::istringstream in(s);
  std::string word, out;
  while (in >> word) {
    if (!out.empty()) out += ' ';
    for (char c : word) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

using Pair = std::pair<std::string, std::string>;

inline Pair key(const elicit::Entry& e) { return {norm(e.tag), norm(e.content)}; }

// Profile minus the union of funnel[t..n-1].addressed, by plain set difference.
inline std::set<Pair> brute_corrupt(const elicit::StructuredProfile& profile,
                                    const std::vector<elicit::QAPair>& funnel, std::size_t t) {
  std::set<Pair> all, removed, out;
  for (const auto& e : profile.entries()) all.insert(key(e));
  for (std::size_t i = t; i < funnel.size(); ++i) {
    for (const auto& e : funnel[i].addressed) removed.insert(key(e));
  }
  std::set_difference(all.begin(), all.end(), removed.begin(), removed.end(),
                      std::inserter(out, out.end()));
  return out;
}

inline std::set<Pair> key_set(const elicit::Entries& entries) {
  std::set<Pair> out;
  for (const auto& e : entries) out.insert(key(e));
  return out;
}

inline std::vector<std::string> ref_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) != 0 || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::map<std::vector<std::string>, int> grams(const std::vector<std::string>& toks,
                                                     std::size_t n) {
  std::map<std::vector<std::string>, int> m;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    m[std::vector<std::string>(toks.begin() + static_cast<long>(i),
                               toks.begin() + static_cast<long>(i + n))]++;
  }
  return m;
}

// Straight product-of-precisions BLEU (no log space), smoothing 0.1/d for
// zero-match orders, orders 1..min(4, |c|).
inline double ref_bleu(const std::string& cand, const std::string& ref) {
  auto c = ref_tokens(cand), r = ref_tokens(ref);
  if (c.empty()) return 0.0;
  std::size_t N = std::min<std::size_t>(4, c.size());
  double product = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    auto cg = grams(c, n), rg = grams(r, n);
    int match = 0;
    for (auto& [g, k] : cg) {
      auto it = rg.find(g);
      if (it != rg.end()) match += std::min(k, it->second);
    }
    double d = static_cast<double>(c.size() - n + 1);
    if (match == 0 && n == 1) return 0.0;
    product *= match == 0 ? 0.1 / d : match / d;
  }
  double bp = c.size() > r.size() ? 1.0 : std::exp(1.0 - double(r.size()) / double(c.size()));
  return bp * std::pow(product, 1.0 / double(N));
}

// Full quadratic LCS table.
inline std::size_t ref_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
  return t[a.size()][b.size()];
}

inline double ref_f1(double overlap, std::size_t c, std::size_t r) {
  if (overlap == 0 || c == 0 || r == 0) return 0.0;
  double p = overlap / double(c), q = overlap / double(r);
  return 2 * p * q / (p + q);
}

inline std::pair<double, double> ref_rouge(const std::string& cand, const std::string& ref) {
  auto c = ref_tokens(cand), r = ref_tokens(ref);
  std::multiset<std::string> rc(r.begin(), r.end());
  std::size_t overlap = 0;
  for (const auto& tok : c) {
    auto it = rc.find(tok);
    if (it != rc.end()) {
      ++overlap;
      rc.erase(it);
    }
  }
  return {ref_f1(double(overlap), c.size(), r.size()), ref_f1(double(ref_lcs(c, r)), c.size(), r.size())};
}

// Quadratic duplicate scan over normalized questions.
inline std::size_t brute_repeats(const std::vector<elicit::QAPair>& turns) {
  std::size_t repeats = 0;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (norm(turns[i].question) == norm(turns[j].question)) {
        ++repeats;
        break;
      }
    }
  }
  return repeats;
}

// ---------------------------------------------------------------------------
// Scratch directory

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("elicit-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Chat-completions stub

inline std::string completion_body(const std::string& content) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  return j.dump();
}

// Serves POST /v1/chat/completions on a free local port. The handler sees the
// parsed request and the 0-based call index.
class StubLlm {
 public:
  using Handler = std::function<void(const nlohmann::json& request, int call, httplib::Response&)>;

  explicit StubLlm(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int call = calls_++;
      {
        std::lock_guard lock(mu_);
        requests_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      handler_(nlohmann::json::parse(req.body), call, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  // Replies with the given completions in order, repeating the last one.
  static StubLlm scripted(std::vector<std::string> replies) {
    return StubLlm([replies = std::move(replies)](const nlohmann::json&, int call, httplib::Response& res) {
      const std::string& r = replies[std::min<std::size_t>(std::size_t(call), replies.size() - 1)];
      res.set_content(completion_body(r), "application/json");
    });
  }

  StubLlm(StubLlm&& other) = delete;

  ~StubLlm() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int calls() const { return calls_; }
  std::vector<std::string> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }
  std::vector<std::string> auth_headers() const {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::vector<std::string> requests_;
  std::vector<std::string> auth_;
};

}  // namespace testing
