// elicit: command-line driver for the profile-elicitation pipelines.
//
// Exit codes
//   0  success
//   1  internal error
//   2  usage or configuration error
//   3  file I/O error
//   4  backend failure (LLM transport, HTTP status, timeout, unparsable output)
//   5  invalid data (profiles, funnels, transcripts)
//   6  simulate finished but some sessions failed
//
// Fatal errors are reported on stderr as one JSON object.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "elicit/codec.hpp"
#include "elicit/config.hpp"
#include "elicit/errors.hpp"
#include "elicit/metrics.hpp"
#include "elicit/pipeline.hpp"
#include "elicit/report.hpp"
#include "elicit/server.hpp"
#include "elicit/synth.hpp"

namespace fs = std::filesystem;
using namespace elicit;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kBackend = 4,
  kData = 5,
  kPartial = 6,
};

// ---------------------------------------------------------------------------
// Error reporting

struct Classified {
  int code = kInternal;
  std::string kind = "internal";
};

Classified classify_one(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {kUsage, "config"};
  if (dynamic_cast<const IoError*>(&e)) return {kIo, "io"};
  if (dynamic_cast<const TimeoutError*>(&e)) return {kBackend, "timeout"};
  if (dynamic_cast<const HttpStatusError*>(&e)) return {kBackend, "http_status"};
  if (dynamic_cast<const TransportError*>(&e)) return {kBackend, "transport"};
  if (dynamic_cast<const BackendError*>(&e)) return {kBackend, "backend"};
  if (dynamic_cast<const ParseError*>(&e)) return {kBackend, "unparsable_output"};
  if (dynamic_cast<const PolicyError*>(&e)) return {kBackend, "policy"};
  if (dynamic_cast<const InconsistentAnswerError*>(&e)) return {kData, "inconsistent_answer"};
  if (dynamic_cast<const ProfileError*>(&e)) return {kData, "profile"};
  if (dynamic_cast<const ValidationError*>(&e)) return {kData, "validation"};
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return {kData, "json"};
  return {};
}

// Walks a nested-exception chain, outermost first. `stage` ends up holding the
// innermost stage label, which names the failing step most precisely.
void collect_chain(const std::exception& e, std::vector<std::pair<Classified, std::string>>& out,
                   std::string& stage) {
  out.emplace_back(classify_one(e), e.what());
  if (const auto* s = dynamic_cast<const StageError*>(&e)) stage = s->stage();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    collect_chain(inner, out, stage);
  } catch (...) {
    out.emplace_back(Classified{}, "non-standard exception");
  }
}

int report_error(const std::string& command, const std::exception& e) {
  std::vector<std::pair<Classified, std::string>> chain;
  std::string stage;
  collect_chain(e, chain, stage);
  // The innermost classified error decides the exit code; stage wrappers only
  // add context.
  Classified c;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if (it->first.code != kInternal) {
      c = it->first;
      break;
    }
  }
  Json err = Json::object();
  err["command"] = command;
  err["kind"] = c.kind;
  err["exit_code"] = c.code;
  err["message"] = e.what();
  if (!stage.empty()) err["stage"] = stage;
  if (chain.size() > 1) {
    Json causes = Json::array();
    for (std::size_t i = 1; i < chain.size(); ++i) causes.push_back(chain[i].second);
    err["causes"] = std::move(causes);
  }
  std::cerr << Json{{"error", err}}.dump() << '\n';
  return c.code;
}

void print_summary(const Json& j) { std::cout << j.dump() << '\n'; }

// ---------------------------------------------------------------------------
// Shared options

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<std::string> llm_endpoint;
  std::optional<std::string> llm_model;
  std::optional<double> llm_temperature;
  std::map<std::string, std::string> backends;  // role -> kind from flags

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON run configuration");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("-j,--parallelism", parallelism, "Maximum concurrent workers")
        ->check(CLI::PositiveNumber);
    app->add_option("--llm-endpoint", llm_endpoint, "Chat-completions endpoint URL");
    app->add_option("--llm-model", llm_model, "Model name sent to the endpoint");
    app->add_option("--llm-temperature", llm_temperature, "Questioner sampling temperature");
  }

  void add_role(CLI::App* app, const std::string& flag, const std::string& role,
                const std::string& help) {
    app->add_option_function<std::string>(
           flag, [this, role](const std::string& v) { backends[role] = v; }, help)
        ->check(CLI::IsMember({"oracle", "llm", "stochastic"}));
  }

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed) cfg.set_seed(*seed);
    if (parallelism) cfg.parallelism = *parallelism;
    if (llm_endpoint) cfg.llm.endpoint_url = *llm_endpoint;
    if (llm_model) cfg.llm.model_name = *llm_model;
    if (llm_temperature) cfg.llm.temperature = *llm_temperature;
    for (const auto& [role, kind] : backends) {
      BackendKind k = parse_backend_kind(kind);
      if (role == "structurer") cfg.roles.structurer = k;
      else if (role == "ranker") cfg.roles.ranker = k;
      else if (role == "generator") cfg.roles.generator = k;
      else if (role == "questioner") cfg.roles.questioner = k;
      else if (role == "simulator") cfg.roles.simulator = k;
      else if (role == "interpreter") cfg.roles.interpreter = k;
      else if (role == "forward") cfg.roles.structurer = cfg.roles.ranker = cfg.roles.generator = k;
    }
    return cfg;
  }
};

// Flag value, then the config's path entry, then the fallback.
fs::path resolve(const std::optional<std::string>& flag, const RunConfig& cfg, const std::string& key,
                 const fs::path& fallback) {
  if (flag) return *flag;
  if (auto it = cfg.paths.find(key); it != cfg.paths.end() && !it->second.empty()) return it->second;
  return fallback;
}

fs::path out_dir(const std::optional<std::string>& flag, const RunConfig& cfg) {
  return resolve(flag, cfg, "out_dir", "out");
}

std::optional<UpdateMode> mode_flag(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return parse_update_mode(*s);
}

// ---------------------------------------------------------------------------
// Subcommands

std::vector<StructuredProfile> synth_from(const RunConfig& cfg) {
  if (cfg.synth_count < 1) throw ConfigError("synth count must be >= 1");
  return synth_profiles(cfg.synth, cfg.synth_count);
}

struct SynthOptions {
  std::optional<std::size_t> count, min_tags, max_tags;
  std::optional<std::string> out_dir;

  void attach(CLI::App* app, bool with_out_dir) {
    app->add_option("-n,--count", count, "Number of profiles");
    app->add_option("--min-tags", min_tags, "Fewest tags per profile");
    app->add_option("--max-tags", max_tags, "Most tags per profile");
    if (with_out_dir) app->add_option("--out-dir", out_dir, "Output directory (default: out)");
  }
  void apply(RunConfig& cfg) const {
    if (count) cfg.synth_count = *count;
    if (min_tags) cfg.synth.min_tags = *min_tags;
    if (max_tags) cfg.synth.max_tags = *max_tags;
  }
};

fs::path run_synth(const RunConfig& cfg, const fs::path& path) {
  std::vector<StructuredProfile> profiles = synth_from(cfg);
  write_profiles(path, profiles);
  return path;
}

struct ForwardOptions {
  std::optional<std::string> input, out_dir, mode;

  void attach(CLI::App* app, bool with_input) {
    if (with_input) app->add_option("-i,--input", input, "Profiles: canonical JSONL, {text} JSONL or a text file");
    app->add_option("-o,--out-dir", out_dir, "Output directory (default: out)");
    app->add_option("--mode", mode, "History mode for questioner rows")
        ->check(CLI::IsMember({"QuestionsAndAnswers", "AnswersOnly"}));
  }
};

Json run_forward_cmd(RunConfig& cfg, const fs::path& input, const fs::path& dir) {
  std::vector<ProfileInput> inputs = read_profile_inputs(input);
  if (inputs.empty()) throw ValidationError(input.string() + " holds no profiles");
  BackendSet backends = make_backends(cfg);
  std::vector<ForwardArtifacts> artifacts =
      run_forward_corpus(inputs, backends.forward(), cfg.forward_mode, cfg.parallelism);
  write_forward_outputs(dir, artifacts);
  std::size_t q = 0, s = 0;
  for (const ForwardArtifacts& a : artifacts) {
    q += a.questioner_rows.size();
    s += a.simulator_rows.size();
  }
  return Json{{"profiles", artifacts.size()},
              {"questioner_rows", q},
              {"simulator_rows", s},
              {"out_dir", dir.string()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Profile elicitation: dataset generation, simulated sessions, metrics and a live session API"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "elicit 0.1.0");

  // synth ------------------------------------------------------------------
  CommonOptions synth_common;
  SynthOptions synth_opts;
  std::optional<std::string> synth_out;
  auto* synth = app.add_subcommand("synth", "Generate seeded synthetic profiles");
  synth_common.attach(synth);
  synth_opts.attach(synth, true);
  synth->add_option("-o,--out", synth_out, "Output JSONL (default: <out-dir>/profiles.jsonl)");

  // forward ----------------------------------------------------------------
  CommonOptions fwd_common;
  ForwardOptions fwd_opts;
  auto* forward = app.add_subcommand("forward", "Corrupt profiles into questioner/simulator training data");
  fwd_common.attach(forward);
  fwd_opts.attach(forward, true);
  fwd_common.add_role(forward, "--backend", "forward", "Backend for structurer, ranker and generator");
  fwd_common.add_role(forward, "--structurer", "structurer", "Structurer backend");
  fwd_common.add_role(forward, "--ranker", "ranker", "Ranker backend");
  fwd_common.add_role(forward, "--generator", "generator", "Funnel generator backend");

  // gen-data ---------------------------------------------------------------
  CommonOptions gen_common;
  SynthOptions gen_synth;
  ForwardOptions gen_fwd;
  auto* gen = app.add_subcommand("gen-data", "synth followed by forward");
  gen_common.attach(gen);
  gen_synth.attach(gen, false);
  gen_fwd.attach(gen, false);
  gen_common.add_role(gen, "--backend", "forward", "Backend for structurer, ranker and generator");

  // simulate ---------------------------------------------------------------
  CommonOptions sim_common;
  SynthOptions sim_synth;
  std::optional<std::string> sim_profiles, sim_out, sim_out_dir, sim_debug, sim_mode;
  std::optional<std::size_t> sim_budget;
  auto* simulate = app.add_subcommand("simulate", "Run questioner/simulator sessions against target profiles");
  sim_common.attach(simulate);
  simulate->add_option("-p,--profiles", sim_profiles,
                       "Target profiles JSONL (default: synthesize from the config)");
  simulate->add_option("--count", sim_synth.count, "Synthetic targets when no profiles are given");
  simulate->add_option("--min-tags", sim_synth.min_tags, "Fewest tags per synthetic target");
  simulate->add_option("--max-tags", sim_synth.max_tags, "Most tags per synthetic target");
  simulate->add_option("--out-dir", sim_out_dir, "Output directory (default: out)");
  simulate->add_option("-o,--out", sim_out, "Transcripts JSONL (default: <out-dir>/transcripts.jsonl)");
  simulate->add_option("--debug-log", sim_debug, "Per-turn timings and raw outputs (JSONL)");
  simulate->add_option("-T,--max-questions", sim_budget, "Question budget per session");
  simulate->add_option("--mode", sim_mode, "History visible to the questioner")
      ->check(CLI::IsMember({"QuestionsAndAnswers", "AnswersOnly"}));
  sim_common.add_role(simulate, "--questioner", "questioner", "Questioner backend");
  sim_common.add_role(simulate, "--simulator", "simulator", "Simulator backend");

  // evaluate ---------------------------------------------------------------
  CommonOptions eval_common;
  std::optional<std::string> eval_in, eval_out_dir;
  auto* evaluate = app.add_subcommand("evaluate", "Score transcripts (report.json and report.csv)");
  eval_common.attach(evaluate);
  evaluate->add_option("-t,--transcripts", eval_in, "Transcripts JSONL (default: <out-dir>/transcripts.jsonl)");
  evaluate->add_option("-o,--out-dir", eval_out_dir, "Output directory (default: out)");

  // report -----------------------------------------------------------------
  CommonOptions rep_common;
  std::vector<std::string> rep_inputs;
  std::optional<std::string> rep_out;
  auto* report = app.add_subcommand("report", "Render score-vs-questions curves to SVG");
  rep_common.attach(report);
  report->add_option("inputs", rep_inputs, "report.json files, optionally as label=path")->required();
  report->add_option("-o,--out", rep_out, "SVG output (default: <out-dir>/curves.svg)");

  // serve ------------------------------------------------------------------
  CommonOptions serve_common;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::optional<std::string> serve_static, serve_log, serve_mode;
  std::optional<std::size_t> serve_budget;
  auto* serve = app.add_subcommand("serve", "HTTP API for live elicitation sessions");
  serve_common.attach(serve);
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--static-dir", serve_static, "Directory served at / (the web client bundle)");
  serve->add_option("--transcript-log", serve_log, "Append finished transcripts here (JSONL)");
  serve->add_option("-T,--max-questions", serve_budget, "Default question budget");
  serve->add_option("--mode", serve_mode, "Default history mode")
      ->check(CLI::IsMember({"QuestionsAndAnswers", "AnswersOnly"}));
  serve_common.add_role(serve, "--questioner", "questioner", "Questioner backend");
  serve_common.add_role(serve, "--interpreter", "interpreter", "Backend that maps free-text answers to entries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    Json err{{"error", {{"command", "cli"}, {"kind", "usage"}, {"exit_code", kUsage}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    return kUsage;
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*synth) {
      RunConfig cfg = synth_common.load();
      synth_opts.apply(cfg);
      fs::path path = resolve(synth_out, cfg, "profiles", out_dir(synth_opts.out_dir, cfg) / "profiles.jsonl");
      cfg.paths["profiles"] = path;
      cfg.validate();
      run_synth(cfg, path);
      print_summary({{"command", command}, {"profiles", cfg.synth_count}, {"out", path.string()}});
      return kOk;
    }

    if (*forward) {
      RunConfig cfg = fwd_common.load();
      if (auto m = mode_flag(fwd_opts.mode)) cfg.forward_mode = *m;
      fs::path dir = out_dir(fwd_opts.out_dir, cfg);
      fs::path input = resolve(fwd_opts.input, cfg, "profiles", dir / "profiles.jsonl");
      cfg.paths["profiles"] = input;
      cfg.paths["out_dir"] = dir;
      cfg.validate();
      Json summary = run_forward_cmd(cfg, input, dir);
      summary["command"] = command;
      print_summary(summary);
      return kOk;
    }

    if (*gen) {
      RunConfig cfg = gen_common.load();
      gen_synth.apply(cfg);
      if (auto m = mode_flag(gen_fwd.mode)) cfg.forward_mode = *m;
      fs::path dir = out_dir(gen_fwd.out_dir, cfg);
      fs::path profiles = dir / "profiles.jsonl";
      cfg.paths["out_dir"] = dir;
      cfg.paths["profiles"] = profiles;
      cfg.validate();
      run_synth(cfg, profiles);
      Json summary = run_forward_cmd(cfg, profiles, dir);
      summary["command"] = command;
      print_summary(summary);
      return kOk;
    }

    if (*simulate) {
      RunConfig cfg = sim_common.load();
      sim_synth.apply(cfg);
      if (sim_budget) cfg.session.max_questions = *sim_budget;
      if (auto m = mode_flag(sim_mode)) cfg.session.update_mode = *m;
      fs::path dir = out_dir(sim_out_dir, cfg);
      fs::path out = resolve(sim_out, cfg, "transcripts", dir / "transcripts.jsonl");
      fs::path failures_path = out;
      failures_path.replace_filename(out.stem().string() + ".failures.jsonl");
      cfg.paths["transcripts"] = out;
      if (sim_debug) cfg.paths["debug_log"] = *sim_debug;
      std::optional<fs::path> profiles_path;
      if (sim_profiles) profiles_path = *sim_profiles;
      else if (auto it = cfg.paths.find("profiles"); it != cfg.paths.end()) profiles_path = it->second;
      cfg.validate();

      std::vector<StructuredProfile> targets = profiles_path ? read_profiles(*profiles_path) : synth_from(cfg);
      if (targets.empty()) throw ValidationError("no target profiles to simulate");
      BackendSet backends = make_backends(cfg);
      BatchResult result = run_batch(*backends.questioner, *backends.simulator, targets, cfg.session,
                                     cfg.parallelism);
      write_transcripts(out, result.transcripts);
      if (auto it = cfg.paths.find("debug_log"); it != cfg.paths.end()) {
        std::vector<Json> rows;
        for (const Transcript& t : result.transcripts) rows.push_back(debug_to_json(t));
        write_jsonl(it->second, rows);
      }
      std::size_t matched = 0;
      for (const Transcript& t : result.transcripts) matched += t.termination == Termination::ProfileMatch;
      Json summary{{"command", command},
                   {"sessions", targets.size()},
                   {"completed", result.transcripts.size()},
                   {"profile_match", matched},
                   {"failed", result.failures.size()},
                   {"out", out.string()}};
      if (!result.failures.empty()) {
        std::vector<Json> rows;
        for (const SessionFailure& f : result.failures) {
          rows.push_back(Json{{"index", f.index}, {"source_id", f.source_id}, {"message", f.message}});
        }
        write_jsonl(failures_path, rows);
        summary["failures"] = failures_path.string();
        print_summary(summary);
        return kPartial;
      }
      print_summary(summary);
      return kOk;
    }

    if (*evaluate) {
      RunConfig cfg = eval_common.load();
      fs::path dir = out_dir(eval_out_dir, cfg);
      fs::path in = resolve(eval_in, cfg, "transcripts", dir / "transcripts.jsonl");
      cfg.validate();
      std::vector<Transcript> transcripts = read_transcripts(in);
      if (transcripts.empty()) throw ValidationError(in.string() + " holds no transcripts");
      MetricsReport r = evaluate_run(transcripts);
      write_text(dir / "report.json", to_json(r).dump(2) + "\n");
      write_text(dir / "report.csv", to_csv(r));
      print_summary({{"command", command},
                     {"transcripts", r.transcript_count},
                     {"bleu_mean", r.bleu_mean},
                     {"rouge1_f_mean", r.rouge1_f_mean},
                     {"rougeL_f_mean", r.rougeL_f_mean},
                     {"out_dir", dir.string()}});
      return kOk;
    }

    if (*report) {
      RunConfig cfg = rep_common.load();
      fs::path out = resolve(rep_out, cfg, "svg", out_dir(std::nullopt, cfg) / "curves.svg");
      std::vector<LabeledReport> reports;
      for (const std::string& arg : rep_inputs) {
        std::string label, path = arg;
        if (auto eq = arg.find('='); eq != std::string::npos) {
          label = arg.substr(0, eq);
          path = arg.substr(eq + 1);
        } else {
          label = fs::path(path).parent_path().filename().string();
          if (label.empty()) label = fs::path(path).stem().string();
        }
        Json j;
        try {
          j = Json::parse(read_text(path));
        } catch (const nlohmann::json::parse_error& e) {
          throw ValidationError(path + ": " + e.what());
        }
        reports.push_back(LabeledReport{label, report_from_json(j)});
      }
      write_text(out, render_curves_svg(reports));
      print_summary({{"command", command}, {"reports", reports.size()}, {"out", out.string()}});
      return kOk;
    }

    if (*serve) {
      RunConfig cfg = serve_common.load();
      if (serve_budget) cfg.session.max_questions = *serve_budget;
      if (auto m = mode_flag(serve_mode)) cfg.session.update_mode = *m;
      fs::path static_dir = resolve(serve_static, cfg, "static_dir", {});
      fs::path log = resolve(serve_log, cfg, "transcript_log", {});
      cfg.validate();
      BackendSet backends = make_backends(cfg);
      ServiceOptions options;
      options.session = cfg.session;
      options.synth = cfg.synth;
      options.transcript_log = log;
      SessionService service(*backends.questioner, *backends.interpreter, options);
      HttpServer server(service, static_dir);
      const int port = server.bind(serve_host, serve_port);

      static std::atomic<bool> stop_requested{false};
      std::signal(SIGINT, [](int) { stop_requested = true; });
      std::signal(SIGTERM, [](int) { stop_requested = true; });
      std::jthread watcher([&server](std::stop_token st) {
        while (!st.stop_requested() && !stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
      });
      print_summary({{"command", command}, {"host", serve_host}, {"port", port}});
      std::cout.flush();
      server.listen();
      watcher.request_stop();
      return kOk;
    }
  } catch (const std::exception& e) {
    return report_error(command, e);
  }
  return kInternal;
}
