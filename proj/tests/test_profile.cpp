#include <doctest.h>

#include "elicit/codec.hpp"
#include "elicit/errors.hpp"
#include "elicit/profile.hpp"
#include "elicit/text.hpp"
#include "support.hpp"

using namespace elicit;

namespace {

const Entry kAction{"Genre", "The user likes action movies"};

QAPair qa(std::string q, std::string a, Entries addressed, std::size_t pos = 0) {
  return QAPair{std::move(q), std::move(a), std::move(addressed), pos};
}

}  // namespace

TEST_SUITE("text") {
  TEST_CASE("trim and normalize") {
    CHECK(trim("  a b \t\n") == "a b");
    CHECK(trim("") == "");
    CHECK(normalize_text("  The   USER\tlikes ") == "the user likes");
    CHECK(iequals("Genre", "gENRE"));
    CHECK_FALSE(iequals("Genre", "Genres"));
  }

  TEST_CASE("split_lines strips carriage returns") {
    auto lines = split_lines("a\r\nb\n\nc\r");
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "a");
    CHECK(lines[1] == "b");
    CHECK(lines[2] == "");
    CHECK(lines[3] == "c");
  }
}

TEST_SUITE("profile") {
  TEST_CASE("construction trims and validates") {
    StructuredProfile p("u1", {{" Genre ", " The user likes action movies  "}});
    CHECK(p.entries().front() == kAction);
    CHECK_THROWS_AS(StructuredProfile("u", {{"Genre", "a"}, {"genre ", "b"}}), ProfileError);
    CHECK_THROWS_AS(StructuredProfile("u", {{"", "a"}}), ProfileError);
    CHECK_THROWS_AS(StructuredProfile("u", {{"Genre", "   "}}), ProfileError);
  }

  TEST_CASE("find and contains are normalized") {
    StructuredProfile p("u", {kAction, {"Directors", "Nolan"}});
    REQUIRE(p.find("genre") != nullptr);
    CHECK(p.find("  GENRE ")->content == kAction.content);
    CHECK(p.find("Tone") == nullptr);
    CHECK(p.contains({"GENRE", "the user likes  ACTION movies"}));
    CHECK_FALSE(p.contains({"Genre", "something else"}));
  }

  TEST_CASE("apply_transition: action-movies example") {
    PartialProfile s = empty_state();
    PartialProfile next = apply_transition(s, qa("Do you like action movies?", "yes", {kAction}));
    CHECK(next.entries.size() == 1);
    CHECK(next.history.size() == 1);
    CHECK(next.entries.front() == kAction);
    // pure: input untouched
    CHECK(s.entries.empty());
    CHECK(s.history.empty());
  }

  TEST_CASE("apply_transition: no-preference turn grows history only") {
    PartialProfile s = apply_transition(empty_state(), qa("Q1", "yes", {kAction}));
    PartialProfile next = apply_transition(s, qa("What about directors?", "No Preference", {}, 1));
    CHECK(next.entries == s.entries);
    CHECK(next.history.size() == s.history.size() + 1);
  }

  TEST_CASE("apply_transition: errors and idempotence") {
    PartialProfile s = apply_transition(empty_state(), qa("Q1", "yes", {kAction}));
    CHECK_THROWS_AS(apply_transition(s, qa("", "x", {})), ProfileError);
    CHECK_THROWS_AS(apply_transition(s, qa("Q2", "x", {{"genre", "Something else"}})),
                    InconsistentAnswerError);
    PartialProfile again = apply_transition(s, qa("Q2", "yes", {{"GENRE", "the user likes action movies"}}));
    CHECK(again.entries.size() == 1);
  }

  TEST_CASE("flatten_profile") {
    CHECK(flatten_profile(Entries{kAction}) == "Genre: The user likes action movies");
    CHECK(flatten_profile(Entries{}) == "");
    Entries two{{"Tone", "Dark"}, kAction};
    CHECK(flatten_profile(two) == "Tone: Dark\nGenre: The user likes action movies");
    CHECK(flatten_sorted(two) == "Genre: The user likes action movies\nTone: Dark");
  }

  TEST_CASE("profiles_equal has set semantics") {
    Entries a{kAction, {"Tone", "Dark"}};
    Entries b{{"tone", "dark"}, kAction};
    CHECK(profiles_equal(a, a));
    CHECK(profiles_equal(a, b));
    CHECK_FALSE(profiles_equal(Entries{kAction}, a));
    CHECK(entries_subset(Entries{kAction}, a));
    CHECK_FALSE(entries_subset(a, Entries{kAction}));
  }

  TEST_CASE("enum names round-trip") {
    for (auto m : {UpdateMode::AnswersOnly, UpdateMode::QuestionsAndAnswers}) {
      CHECK(parse_update_mode(to_string(m)) == m);
    }
    for (auto t : {Termination::ProfileMatch, Termination::QuestionBudgetExhausted}) {
      CHECK(parse_termination(to_string(t)) == t);
    }
    CHECK_THROWS_AS(parse_update_mode("Sometimes"), ConfigError);
  }
}

TEST_SUITE("codec") {
  TEST_CASE("profile JSON is canonical") {
    StructuredProfile p("u1", {kAction});
    CHECK(to_json(p).dump() ==
          R"({"source_id":"u1","entries":[{"tag":"Genre","content":"The user likes action movies"}]})");
    CHECK(profile_from_json(to_json(p)) == p);
    CHECK_THROWS(profile_from_json(Json::parse(R"({"source_id":"x"})")));
  }

  TEST_CASE("QA pair and transcript round-trip") {
    QAPair a = qa("What is your preferred Genre?", kAction.content, {kAction}, 0);
    CHECK(qa_from_json(to_json(a)) == a);

    Transcript t;
    t.target = StructuredProfile("u1", {kAction, {"Tone", "Dark"}});
    t.turns = {a, qa("What is your preferred Humor?", "No Preference", {}, 1)};
    t.reconstructed.entries = {kAction};
    t.reconstructed.history = t.turns;
    t.termination = Termination::QuestionBudgetExhausted;
    t.question_count = 2;
    Transcript back = transcript_from_json(to_json(t));
    CHECK(back.target == t.target);
    CHECK(back.turns == t.turns);
    CHECK(back.reconstructed == t.reconstructed);
    CHECK(back.termination == t.termination);
    CHECK(back.question_count == 2);
    CHECK(to_json(back).dump() == to_json(t).dump());

    Json j = to_json(t);
    j["question_count"] = 5;
    CHECK_THROWS(transcript_from_json(j));
  }

  TEST_CASE("JSONL files") {
    testing::TempDir dir;
    std::vector<Json> rows{Json{{"a", 1}}, Json{{"b", "x"}}};
    write_jsonl(dir / "nested/out.jsonl", rows);
    CHECK(read_text(dir / "nested/out.jsonl") == "{\"a\":1}\n{\"b\":\"x\"}\n");
    CHECK(read_jsonl(dir / "nested/out.jsonl") == rows);

    write_text(dir / "bad.jsonl", "{\"a\":1}\n\n{oops\n");
    try {
      read_jsonl(dir / "bad.jsonl");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    CHECK_THROWS_AS(read_text(dir / "missing.jsonl"), IoError);
  }
}
