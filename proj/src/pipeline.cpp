#include "elicit/pipeline.hpp"

#include <atomic>
#include <optional>
#include <thread>

#include "elicit/codec.hpp"
#include "elicit/errors.hpp"
#include "elicit/llm_backends.hpp"

namespace elicit {
namespace {

std::shared_ptr<const LlmClient> client_for(const RunConfig& cfg, std::string_view role) {
  return std::make_shared<const LlmClient>(cfg.llm_for(role));
}

}  // namespace

BackendSet make_backends(const RunConfig& cfg) {
  BackendSet set;
  const RoleSelection& r = cfg.roles;

  if (r.structurer == BackendKind::Llm) set.structurer = std::make_unique<LlmStructurer>(client_for(cfg, "structurer"));
  else set.structurer = std::make_unique<OracleStructurer>();

  if (r.ranker == BackendKind::Llm) set.ranker = std::make_unique<LlmRanker>(client_for(cfg, "ranker"));
  else set.ranker = std::make_unique<OracleRanker>();

  if (r.generator == BackendKind::Llm) set.generator = std::make_unique<LlmFunnelGenerator>(client_for(cfg, "generator"));
  else set.generator = std::make_unique<OracleFunnelGenerator>();

  switch (r.questioner) {
    case BackendKind::Llm:
      set.questioner = std::make_unique<LlmQuestioner>(client_for(cfg, "questioner"));
      break;
    case BackendKind::Stochastic:
      set.questioner = std::make_unique<StochasticTemplateQuestioner>(
          cfg.stochastic_vocabulary.empty() ? cfg.synth.vocabulary : cfg.stochastic_vocabulary);
      break;
    case BackendKind::Oracle:
      set.questioner = std::make_unique<OracleQuestioner>();
      break;
  }

  if (r.simulator == BackendKind::Llm) set.simulator = std::make_unique<LlmAnswerer>(client_for(cfg, "simulator"));
  else set.simulator = std::make_unique<OracleAnswerer>();

  if (r.interpreter == BackendKind::Llm) set.interpreter = std::make_unique<LlmAnswerInterpreter>(client_for(cfg, "interpreter"));
  else set.interpreter = std::make_unique<OracleAnswerInterpreter>();
  return set;
}

std::vector<ProfileInput> read_profile_inputs(const std::filesystem::path& path) {
  std::vector<ProfileInput> inputs;
  if (path.extension() != ".jsonl") {
    inputs.push_back(ProfileInput{path.stem().string(), read_text(path)});
    return inputs;
  }
  std::size_t index = 0;
  for (const Json& row : read_jsonl(path)) {
    ProfileInput in;
    in.source_id = row.contains("source_id") && row["source_id"].is_string()
                       ? row["source_id"].get<std::string>()
                       : path.stem().string() + "-" + std::to_string(index);
    if (row.contains("entries")) {
      in.text = flatten_profile(profile_from_json(row));
    } else if (row.contains("text") && row["text"].is_string()) {
      in.text = row["text"].get<std::string>();
    } else {
      throw ValidationError(path.string() + ": line " + std::to_string(index + 1) +
                            " has neither 'entries' nor 'text'");
    }
    inputs.push_back(std::move(in));
    ++index;
  }
  return inputs;
}

std::vector<StructuredProfile> read_profiles(const std::filesystem::path& path) {
  std::vector<StructuredProfile> out;
  for (const Json& row : read_jsonl(path)) out.push_back(profile_from_json(row));
  return out;
}

void write_profiles(const std::filesystem::path& path, std::span<const StructuredProfile> profiles) {
  std::vector<Json> rows;
  for (const StructuredProfile& p : profiles) rows.push_back(to_json(p));
  write_jsonl(path, rows);
}

std::vector<ForwardArtifacts> run_forward_corpus(std::span<const ProfileInput> inputs,
                                                 const ForwardBackends& backends,
                                                 UpdateMode mode, std::size_t parallelism) {
  std::vector<std::optional<ForwardArtifacts>> results(inputs.size());
  std::vector<std::exception_ptr> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size() && !failed; i = next++) {
      try {
        results[i] = run_forward(inputs[i].text, backends, ForwardConfig{inputs[i].source_id, mode});
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, inputs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      std::throw_with_nested(StageError("forward[" + inputs[i].source_id + "]", e.what()));
    }
  }
  std::vector<ForwardArtifacts> out;
  out.reserve(inputs.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

void write_forward_outputs(const std::filesystem::path& dir,
                           std::span<const ForwardArtifacts> artifacts) {
  std::vector<Json> questioner;
  std::vector<Json> simulator;
  std::vector<Json> funnels;
  for (const ForwardArtifacts& a : artifacts) {
    for (const TrainingExample& row : a.questioner_rows) questioner.push_back(to_json(row));
    for (const SimulatorExample& row : a.simulator_rows) simulator.push_back(to_json(row));
    Json f = Json::object();
    f["source_id"] = a.profile.source_id();
    f["profile"] = to_json(a.profile);
    f["ranking"] = to_json(a.ranking);
    Json qs = Json::array();
    for (const QAPair& qa : a.funnel) qs.push_back(to_json(qa));
    f["funnel"] = std::move(qs);
    funnels.push_back(std::move(f));
  }
  write_jsonl(dir / "questioner.jsonl", questioner);
  write_jsonl(dir / "simulator.jsonl", simulator);
  write_jsonl(dir / "funnels.jsonl", funnels);
}

void write_transcripts(const std::filesystem::path& path, std::span<const Transcript> transcripts) {
  std::vector<Json> rows;
  for (const Transcript& t : transcripts) rows.push_back(to_json(t));
  write_jsonl(path, rows);
}

std::vector<Transcript> read_transcripts(const std::filesystem::path& path) {
  std::vector<Transcript> out;
  for (const Json& row : read_jsonl(path)) out.push_back(transcript_from_json(row));
  return out;
}

}  // namespace elicit
