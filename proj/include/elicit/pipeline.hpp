#pragma once

// File-level pipelines shared by the CLI and the acceptance suite.

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "elicit/backends.hpp"
#include "elicit/config.hpp"
#include "elicit/forward.hpp"
#include "elicit/llm_client.hpp"
#include "elicit/session.hpp"

namespace elicit {

// Owns one backend per role, built from a RunConfig. LLM roles sharing the
// same resolved endpoint settings still get separate clients.
struct BackendSet {
  std::unique_ptr<Structurer> structurer;
  std::unique_ptr<Ranker> ranker;
  std::unique_ptr<FunnelGenerator> generator;
  std::unique_ptr<Questioner> questioner;
  std::unique_ptr<Answerer> simulator;
  std::unique_ptr<AnswerInterpreter> interpreter;

  ForwardBackends forward() const { return {*structurer, *ranker, *generator}; }
};

BackendSet make_backends(const RunConfig& cfg);

struct ProfileInput {
  std::string source_id;
  std::string text;
};

// JSONL whose lines are canonical profiles ({"source_id", "entries"}, rendered
// to `tag: content` text) or raw text ({"source_id", "text"}). Any other file
// is read whole as one text profile named after its stem.
std::vector<ProfileInput> read_profile_inputs(const std::filesystem::path& path);

// Canonical-profile JSONL.
std::vector<StructuredProfile> read_profiles(const std::filesystem::path& path);
void write_profiles(const std::filesystem::path& path, std::span<const StructuredProfile> profiles);

// Runs the forward process over every input, preserving order. The first
// failure aborts the corpus with the offending source id in the message.
std::vector<ForwardArtifacts> run_forward_corpus(std::span<const ProfileInput> inputs,
                                                 const ForwardBackends& backends,
                                                 UpdateMode mode, std::size_t parallelism = 1);

// Writes questioner.jsonl, simulator.jsonl and funnels.jsonl into `dir`.
void write_forward_outputs(const std::filesystem::path& dir,
                           std::span<const ForwardArtifacts> artifacts);

void write_transcripts(const std::filesystem::path& path, std::span<const Transcript> transcripts);
std::vector<Transcript> read_transcripts(const std::filesystem::path& path);

}  // namespace elicit
