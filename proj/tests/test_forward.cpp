#include <doctest.h>

#include "elicit/backends.hpp"
#include "elicit/errors.hpp"
#include "elicit/forward.hpp"
#include "elicit/synth.hpp"
#include "support.hpp"

using namespace elicit;

namespace {

const Entry kAction{"Genre", "The user likes action movies"};

std::vector<StructuredProfile> corpus(std::size_t n, std::uint64_t seed = 11) {
  SyntheticProfileSpec spec = SyntheticProfileSpec::defaults();
  spec.seed = seed;
  spec.min_tags = 1;
  return synth_profiles(spec, n);
}

ForwardArtifacts forward_oracle(const StructuredProfile& p, UpdateMode mode = UpdateMode::QuestionsAndAnswers) {
  OracleStructurer s;
  OracleRanker r;
  OracleFunnelGenerator g;
  return run_forward(flatten_profile(p), ForwardBackends{s, r, g}, ForwardConfig{p.source_id(), mode});
}

}  // namespace

TEST_SUITE("oracle structurer") {
  TEST_CASE("single line") {
    StructuredProfile p = oracle_structure("Genre: The user likes action movies", "u");
    REQUIRE(p.size() == 1);
    CHECK(p.entries()[0] == kAction);
  }

  TEST_CASE("lines in file order; blank and colon-less lines skipped") {
    StructuredProfile p = oracle_structure("Tone: dark\n\nnot a pair\nGenre: likes action\r\nDirectors: likes Nolan: early work\n");
    REQUIRE(p.size() == 3);
    CHECK(p.entries()[0].tag == "Tone");
    CHECK(p.entries()[1].tag == "Genre");
    CHECK(p.entries()[2] == Entry{"Directors", "likes Nolan: early work"});
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(oracle_structure(""), ProfileError);
    CHECK_THROWS_AS(oracle_structure("no pairs here"), ProfileError);
    CHECK_THROWS_AS(oracle_structure("Genre: a\ngenre: b"), ProfileError);
  }

  TEST_CASE("round trip over canonical text") {
    for (const auto& p : corpus(50)) {
      std::string text = flatten_profile(p);
      CHECK(flatten_profile(oracle_structure(text, p.source_id())) == text);
    }
  }
}

TEST_SUITE("ranking") {
  TEST_CASE("lexicon orders Genre before Directors") {
    StructuredProfile p("u", {{"Directors", "Nolan"}, {"Genre", "action"}});
    CHECK(oracle_rank(p).tags == std::vector<std::string>{"Genre", "Directors"});
  }

  TEST_CASE("single tag and unknown tags") {
    CHECK(oracle_rank(StructuredProfile("u", {{"Tone", "x"}})).tags == std::vector<std::string>{"Tone"});
    StructuredProfile p("u", {{"zebra", "x"}, {"Apple", "y"}, {"Humor", "z"}});
    CHECK(oracle_rank(p).tags == std::vector<std::string>{"Humor", "Apple", "zebra"});
  }

  TEST_CASE("lexicon content") {
    CHECK(kLexiconVersion == "movie-concepts/v1");
    CHECK(generality_lexicon() ==
          std::vector<std::string>{"Genre", "Film Era", "Decade", "Directors", "Visual Style", "Tone",
                                   "Special Effects", "Humor", "Atmosphere"});
  }

  TEST_CASE("validate_ranking") {
    StructuredProfile p("u", {{"Genre", "a"}, {"Tone", "b"}});
    CHECK_NOTHROW(validate_ranking(p, TagRanking{{"tone", "Genre"}}));
    CHECK_THROWS_AS(validate_ranking(p, TagRanking{{"Genre"}}), ValidationError);
    CHECK_THROWS_AS(validate_ranking(p, TagRanking{{"Genre", "Genre", "Tone"}}), ValidationError);
    CHECK_THROWS_AS(validate_ranking(p, TagRanking{{"Genre", "Tone", "Humor"}}), ValidationError);
  }
}

TEST_SUITE("funnel") {
  TEST_CASE("single-tag template") {
    StructuredProfile p("u", {kAction});
    auto f = oracle_funnel(p, oracle_rank(p));
    REQUIRE(f.size() == 1);
    CHECK(f[0] == QAPair{"What is your preferred Genre?", kAction.content, {kAction}, 0});
  }

  TEST_CASE("three tags in ranking order") {
    StructuredProfile p("u", {{"Humor", "dry"}, {"Genre", "drama"}, {"Decade", "1970s"}});
    auto f = oracle_funnel(p, oracle_rank(p));
    REQUIRE(f.size() == 3);
    CHECK(f[0].addressed == Entries{{"Genre", "drama"}});
    CHECK(f[1].addressed == Entries{{"Decade", "1970s"}});
    CHECK(f[2].addressed == Entries{{"Humor", "dry"}});
    CHECK_NOTHROW(validate_funnel(p, oracle_rank(p), f));
  }

  TEST_CASE("validate_funnel rejects each broken invariant") {
    StructuredProfile p("u", {{"Genre", "drama"}, {"Decade", "1970s"}});
    TagRanking r = oracle_rank(p);
    auto good = oracle_funnel(p, r);

    auto bad = good;
    bad[1].position = 5;
    CHECK_THROWS_AS(validate_funnel(p, r, bad), ValidationError);

    bad = good;
    bad[0].question = "  ";
    CHECK_THROWS_AS(validate_funnel(p, r, bad), ValidationError);

    bad = good;
    bad[0].addressed.clear();
    CHECK_THROWS_AS(validate_funnel(p, r, bad), ValidationError);

    bad = good;
    bad[0].addressed = {{"Genre", "comedy"}};
    CHECK_THROWS_AS(validate_funnel(p, r, bad), ValidationError);

    bad = {good[0]};
    CHECK_THROWS_AS(validate_funnel(p, r, bad), ValidationError);  // coverage gap

    bad = {good[1], good[0]};
    bad[0].position = 0;
    bad[1].position = 1;
    CHECK_THROWS_AS(validate_funnel(p, r, bad), ValidationError);  // order
  }
}

TEST_SUITE("corrupt") {
  TEST_CASE("boundaries on a two-question funnel") {
    StructuredProfile p("u", {{"Genre", "drama"}, {"Decade", "1970s"}});
    auto f = oracle_funnel(p, oracle_rank(p));
    PartialProfile full = corrupt(p, f, 2);
    CHECK(profiles_equal(full, p));
    CHECK(full.history.size() == 2);
    PartialProfile empty = corrupt(p, f, 0);
    CHECK(empty.entries.empty());
    CHECK(empty.history.empty());
    CHECK_THROWS_AS(corrupt(p, f, 3), ValidationError);
  }

  TEST_CASE("overlapping addressed sets") {
    StructuredProfile p("u", {{"Genre", "drama"}, {"Decade", "1970s"}, {"Tone", "dark"}});
    std::vector<QAPair> f{
        {"Q0", "a", {{"Genre", "drama"}, {"Decade", "1970s"}}, 0},
        {"Q1", "b", {{"Decade", "1970s"}, {"Tone", "dark"}}, 1},
        {"Q2", "c", {{"Tone", "dark"}}, 2},
    };
    for (std::size_t t = 0; t <= f.size(); ++t) {
      CHECK(testing::key_set(corrupt(p, f, t).entries) == testing::brute_corrupt(p, f, t));
    }
    CHECK(corrupt(p, f, 1).entries == Entries{{"Genre", "drama"}});
  }

  TEST_CASE("property: matches set difference, monotone, history prefix") {
    for (const auto& p : corpus(100)) {
      auto f = oracle_funnel(p, oracle_rank(p));
      for (std::size_t t = 0; t <= f.size(); ++t) {
        PartialProfile s = corrupt(p, f, t);
        CHECK(testing::key_set(s.entries) == testing::brute_corrupt(p, f, t));
        CHECK(s.history == std::vector<QAPair>(f.begin(), f.begin() + static_cast<long>(t)));
        if (t < f.size()) CHECK(entries_subset(s.entries, corrupt(p, f, t + 1).entries));
      }
    }
  }

  TEST_CASE("replaying the funnel from empty rebuilds the profile") {
    for (const auto& p : corpus(100, 3)) {
      PartialProfile s = empty_state();
      for (const QAPair& qa : oracle_funnel(p, oracle_rank(p))) s = apply_transition(s, qa);
      CHECK(profiles_equal(s, p));
    }
  }
}

TEST_SUITE("datasets") {
  TEST_CASE("n = 1") {
    StructuredProfile p("u", {kAction});
    auto f = oracle_funnel(p, oracle_rank(p));
    auto rows = build_questioner_dataset(p, f);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].input_state.entries.empty());
    CHECK(rows[0].target_question == f[0].question);
  }

  TEST_CASE("n = 3: descending steps, cross-checked with corrupt") {
    StructuredProfile p("u", {{"Humor", "dry"}, {"Genre", "drama"}, {"Decade", "1970s"}});
    auto f = oracle_funnel(p, oracle_rank(p));
    auto rows = build_questioner_dataset(p, f, UpdateMode::AnswersOnly);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].step == 2);
    CHECK(rows[0].input_state.entries.size() == 2);
    for (const auto& row : rows) {
      CHECK(row.input_state == corrupt(p, f, row.step, UpdateMode::AnswersOnly));
      CHECK(row.target_question == f[row.step].question);
    }
  }

  TEST_CASE("simulator rows: action-movies example") {
    StructuredProfile p("u", {kAction});
    std::vector<QAPair> f{{"Do you like action movies?", "yes", {kAction}, 0}};
    auto rows = build_simulator_dataset(p, f);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].question == "Do you like action movies?");
    CHECK(rows[0].full_profile == p);
    CHECK(rows[0].target_answer == "yes");
    CHECK(rows[0].target_addressed == Entries{kAction});
  }

  TEST_CASE("simulator rows: addressed subset of profile over 100 profiles") {
    std::size_t rows = 0;
    for (const auto& p : corpus(100, 5)) {
      auto a = forward_oracle(p);
      CHECK(a.simulator_rows.size() == a.funnel.size());
      for (const auto& row : a.simulator_rows) {
        ++rows;
        CHECK(entries_subset(row.target_addressed, row.full_profile.entries()));
      }
    }
    CHECK(rows > 100);
  }
}

TEST_SUITE("run_forward") {
  TEST_CASE("1-line profile") {
    auto a = forward_oracle(StructuredProfile("u", {kAction}));
    CHECK(a.funnel.size() == 1);
    CHECK(a.questioner_rows.size() == 1);
    CHECK(a.simulator_rows.size() == 1);
  }

  TEST_CASE("m-line profiles give m rows") {
    for (const auto& p : corpus(30, 9)) {
      auto a = forward_oracle(p);
      CHECK(a.profile == p);
      CHECK(a.questioner_rows.size() == p.size());
      CHECK_NOTHROW(validate_funnel(a.profile, a.ranking, a.funnel));
    }
  }

  TEST_CASE("failures carry the stage and the original error") {
    OracleStructurer s;
    OracleRanker r;
    OracleFunnelGenerator g;
    try {
      run_forward("nothing structured", ForwardBackends{s, r, g}, ForwardConfig{"u"});
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == "structure");
      CHECK_THROWS_AS(std::rethrow_if_nested(e), ProfileError);
    }

    struct BrokenRanker final : Ranker {
      TagRanking rank(const StructuredProfile&) const override { return {{"Nope"}}; }
    } broken;
    try {
      run_forward("Genre: a", ForwardBackends{s, broken, g}, ForwardConfig{"u"});
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == "rank");
    }
  }
}
