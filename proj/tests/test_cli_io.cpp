#include <doctest.h>

#include <set>

#include "elicit/codec.hpp"
#include "elicit/config.hpp"
#include "elicit/errors.hpp"
#include "elicit/pipeline.hpp"
#include "elicit/report.hpp"
#include "elicit/synth.hpp"
#include "elicit/text.hpp"
#include "support.hpp"

using namespace elicit;

TEST_SUITE("synth_profiles") {
  TEST_CASE("seed 1, count 1, 3 tags") {
    SyntheticProfileSpec spec = SyntheticProfileSpec::defaults();
    spec.seed = 1;
    spec.min_tags = spec.max_tags = 3;
    auto p = synth_profiles(spec, 1);
    REQUIRE(p.size() == 1);
    CHECK(p[0].size() == 3);
    CHECK(p[0].source_id() == "synth-1-0");
  }

  TEST_CASE("deterministic per seed") {
    SyntheticProfileSpec spec = SyntheticProfileSpec::defaults();
    spec.seed = 42;
    CHECK(synth_profiles(spec, 30) == synth_profiles(spec, 30));
    SyntheticProfileSpec other = spec;
    other.seed = 43;
    CHECK_FALSE(synth_profiles(spec, 30) == synth_profiles(other, 30));
  }

  TEST_CASE("count 100: distinct ids, valid profiles, sizes in range") {
    SyntheticProfileSpec spec = SyntheticProfileSpec::defaults();
    auto ps = synth_profiles(spec, 100);
    std::set<std::string> ids;
    std::set<std::size_t> sizes;
    for (const auto& p : ps) {
      ids.insert(p.source_id());
      sizes.insert(p.size());
      CHECK(p.size() >= 3);
      CHECK(p.size() <= 9);
      CHECK_NOTHROW(validate_entries(p.entries()));
      for (const auto& e : p.entries()) {
        CHECK(std::find(spec.vocabulary.begin(), spec.vocabulary.end(), e.tag) != spec.vocabulary.end());
      }
    }
    CHECK(ids.size() == 100);
    CHECK(sizes.size() == 7);  // every size from 3 to 9 shows up
  }

  TEST_CASE("default vocabulary is the concept lexicon") {
    CHECK(SyntheticProfileSpec::defaults().vocabulary == generality_lexicon());
  }

  TEST_CASE("custom vocabulary uses the generic template") {
    SyntheticProfileSpec spec;
    spec.vocabulary = {"Pacing", "Runtime"};
    spec.min_tags = 1;
    spec.max_tags = 2;
    for (const auto& p : synth_profiles(spec, 10)) {
      for (const auto& e : p.entries()) CHECK(e.content.find(to_lower(e.tag)) != std::string::npos);
    }
  }

  TEST_CASE("invalid specs") {
    SyntheticProfileSpec spec = SyntheticProfileSpec::defaults();
    spec.min_tags = 0;
    CHECK_THROWS_AS(synth_profiles(spec, 1), ConfigError);
    spec = SyntheticProfileSpec::defaults();
    spec.max_tags = 10;
    CHECK_THROWS_AS(synth_profiles(spec, 1), ConfigError);
    spec = SyntheticProfileSpec::defaults();
    spec.min_tags = 5;
    spec.max_tags = 4;
    CHECK_THROWS_AS(synth_profiles(spec, 1), ConfigError);
    spec = SyntheticProfileSpec::defaults();
    CHECK_THROWS_AS(synth_profiles(spec, 0), ConfigError);
    spec.vocabulary = {"Genre", "genre"};
    CHECK_THROWS_AS(synth_profiles(spec, 1), ConfigError);
  }
}

TEST_SUITE("run config") {
  TEST_CASE("full document") {
    Json j = Json::parse(R"({
      "seed": 7,
      "parallelism": 3,
      "paths": {"profiles": "in/profiles.jsonl", "out_dir": "out"},
      "backends": {"questioner": "stochastic", "simulator": "llm"},
      "llm": {"endpoint_url": "http://localhost:9/v1/chat/completions", "model_name": "m",
              "temperature": 0.7, "max_retries": 4, "request_timeout_ms": 1500},
      "llm_roles": {"simulator": {"model_name": "sim"}},
      "session": {"max_questions": 12, "update_mode": "AnswersOnly"},
      "forward": {"mode": "AnswersOnly"},
      "synth": {"count": 5, "min_tags": 2, "max_tags": 4},
      "stochastic_vocabulary": ["Genre", "Tone"]
    })");
    RunConfig cfg = run_config_from_json(j);
    CHECK(cfg.seed == 7);
    CHECK(cfg.session.seed == 7);
    CHECK(cfg.synth.seed == 7);
    CHECK(cfg.parallelism == 3);
    CHECK(cfg.roles.questioner == BackendKind::Stochastic);
    CHECK(cfg.roles.simulator == BackendKind::Llm);
    CHECK(cfg.roles.ranker == BackendKind::Oracle);
    CHECK(cfg.session.max_questions == 12);
    CHECK(cfg.session.update_mode == UpdateMode::AnswersOnly);
    CHECK(cfg.forward_mode == UpdateMode::AnswersOnly);
    CHECK(cfg.synth_count == 5);
    CHECK(cfg.llm.max_retries == 4);
    CHECK(cfg.llm.request_timeout == std::chrono::milliseconds(1500));
    // only the questioner samples; every other role runs at temperature 0
    CHECK(cfg.llm_for("questioner").temperature == 0.7);
    CHECK(cfg.llm_for("simulator").temperature == 0.0);
    CHECK(cfg.llm_for("simulator").model_name == "sim");
    CHECK(cfg.llm_for("ranker").model_name == "m");
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"sed": 1})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"backends": {"judge": "oracle"}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"backends": {"ranker": "magic"}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"backends": {"ranker": "stochastic"}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"seed": "seven"})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"session": {"max_questions": 0}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse(R"({"paths": {"a": "x.jsonl", "b": "./x.jsonl"}})")),
                    ConfigError);
    CHECK_THROWS_AS(run_config_from_json(Json::parse("[]")), ConfigError);
  }

  TEST_CASE("files") {
    testing::TempDir dir;
    CHECK_THROWS_AS(load_run_config(dir / "missing.json"), IoError);
    write_text(dir / "bad.json", "{ not json");
    CHECK_THROWS_AS(load_run_config(dir / "bad.json"), ConfigError);
    write_text(dir / "ok.json", R"({"seed": 3})");
    CHECK(load_run_config(dir / "ok.json").seed == 3);
  }
}

TEST_SUITE("pipeline io") {
  TEST_CASE("profiles round-trip through JSONL") {
    testing::TempDir dir;
    auto ps = synth_profiles(SyntheticProfileSpec::defaults(), 25);
    write_profiles(dir / "p.jsonl", ps);
    CHECK(read_profiles(dir / "p.jsonl") == ps);
  }

  TEST_CASE("profile inputs: canonical, text rows and plain text") {
    testing::TempDir dir;
    write_text(dir / "mixed.jsonl",
               R"({"source_id":"a","entries":[{"tag":"Genre","content":"drama"}]})"
               "\n"
               R"({"text":"Tone: dark"})"
               "\n");
    auto in = read_profile_inputs(dir / "mixed.jsonl");
    REQUIRE(in.size() == 2);
    CHECK(in[0].source_id == "a");
    CHECK(in[0].text == "Genre: drama");
    CHECK(in[1].source_id == "mixed-1");
    CHECK(in[1].text == "Tone: dark");

    write_text(dir / "alice.txt", "Genre: drama\nTone: dark\n");
    auto single = read_profile_inputs(dir / "alice.txt");
    REQUIRE(single.size() == 1);
    CHECK(single[0].source_id == "alice");

    write_text(dir / "bad.jsonl", R"({"source_id":"x"})");
    CHECK_THROWS_AS(read_profile_inputs(dir / "bad.jsonl"), ValidationError);
  }

  TEST_CASE("forward corpus: order, row totals and every artifact round-trips") {
    auto ps = synth_profiles(SyntheticProfileSpec::defaults(), 40);
    std::vector<ProfileInput> inputs;
    std::size_t total = 0;
    for (const auto& p : ps) {
      inputs.push_back({p.source_id(), flatten_profile(p)});
      total += p.size();
    }
    RunConfig cfg;
    BackendSet b = make_backends(cfg);
    auto serial = run_forward_corpus(inputs, b.forward(), UpdateMode::QuestionsAndAnswers, 1);
    auto parallel = run_forward_corpus(inputs, b.forward(), UpdateMode::QuestionsAndAnswers, 6);
    CHECK(serial == parallel);
    std::size_t rows = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(serial[i].profile.source_id() == ps[i].source_id());
      rows += serial[i].questioner_rows.size();
      for (const auto& r : serial[i].questioner_rows) CHECK(training_example_from_json(to_json(r)) == r);
      for (const auto& r : serial[i].simulator_rows) CHECK(simulator_example_from_json(to_json(r)) == r);
    }
    CHECK(rows == total);

    testing::TempDir dir;
    write_forward_outputs(dir.path(), serial);
    CHECK(read_jsonl(dir / "questioner.jsonl").size() == total);
    CHECK(read_jsonl(dir / "simulator.jsonl").size() == total);
    CHECK(read_jsonl(dir / "funnels.jsonl").size() == ps.size());
  }

  TEST_CASE("forward corpus failure names the profile") {
    std::vector<ProfileInput> inputs{{"good", "Genre: drama"}, {"broken", "no pairs"}};
    RunConfig cfg;
    BackendSet b = make_backends(cfg);
    try {
      run_forward_corpus(inputs, b.forward(), UpdateMode::QuestionsAndAnswers);
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == "forward[broken]");
    }
  }

  TEST_CASE("transcripts round-trip through JSONL") {
    RunConfig cfg;
    BackendSet b = make_backends(cfg);
    auto ps = synth_profiles(SyntheticProfileSpec::defaults(), 15);
    SessionConfig sc;
    sc.max_questions = 4;
    BatchResult r = run_batch(*b.questioner, *b.simulator, ps, sc);
    testing::TempDir dir;
    write_transcripts(dir / "t.jsonl", r.transcripts);
    auto back = read_transcripts(dir / "t.jsonl");
    REQUIRE(back.size() == r.transcripts.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].target == r.transcripts[i].target);
      CHECK(back[i].turns == r.transcripts[i].turns);
      CHECK(back[i].reconstructed == r.transcripts[i].reconstructed);
      CHECK(back[i].termination == r.transcripts[i].termination);
    }
  }

  TEST_CASE("make_backends honours the role selection") {
    RunConfig cfg;
    cfg.roles.questioner = BackendKind::Stochastic;
    BackendSet b = make_backends(cfg);
    CHECK(dynamic_cast<StochasticTemplateQuestioner*>(b.questioner.get()) != nullptr);
    CHECK(dynamic_cast<OracleAnswerer*>(b.simulator.get()) != nullptr);
    cfg.roles.simulator = BackendKind::Llm;
    CHECK_THROWS_AS(make_backends(cfg), ConfigError);  // no endpoint configured
  }
}

TEST_SUITE("report") {
  MetricsReport sample() {
    MetricsReport r;
    r.transcript_count = 2;
    r.turn_count = 5;
    r.bleu_mean = 0.5;
    r.rouge1_f_mean = 0.75;
    r.rougeL_f_mean = 0.625;
    r.unanswered_rate = 0.2;
    r.repetition_rate = 0.0;
    r.per_position_scores = {{0, 0, 0, 0}, {1, 0.25, 0.5, 0.5}, {2, 0.5, 0.75, 0.625}};
    r.weighted_ranks = {{"Genre", 1.0}, {"Visual Style, Era", 2.5}};
    return r;
  }

  TEST_CASE("JSON round trip") {
    MetricsReport r = sample();
    MetricsReport back = report_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
    CHECK_THROWS_AS(report_from_json(Json::parse("{}")), ValidationError);
  }

  TEST_CASE("CSV rows") {
    std::string csv = to_csv(sample());
    CHECK(csv.rfind("kind,name,value\n", 0) == 0);
    CHECK(csv.find("metric,bleu_mean,0.5\n") != std::string::npos);
    CHECK(csv.find("wr,Genre,1\n") != std::string::npos);
    CHECK(csv.find("wr,\"Visual Style, Era\",2.5\n") != std::string::npos);
    CHECK(csv.find("curve_rouge1_f,2,0.75\n") != std::string::npos);
  }

  TEST_CASE("SVG has one polyline per curve and report") {
    std::vector<LabeledReport> reports{{"QA", sample()}, {"A<only>", sample()}};
    std::string svg = render_curves_svg(reports);
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t lines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) ++lines;
    CHECK(lines == 6);
    CHECK(svg.find("A&lt;only&gt;") != std::string::npos);
  }
}
