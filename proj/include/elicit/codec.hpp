#pragma once

// JSON encodings shared by every file and HTTP interface. Field order is
// stable (ordered_json), so identical values always serialize to identical
// bytes.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/forward.hpp"
#include "elicit/profile.hpp"

namespace elicit {

using Json = nlohmann::ordered_json;

Json to_json(std::span<const Entry> entries);
Entries entries_from_json(const Json& j);

// Canonical profile: {"source_id": ..., "entries": [{"tag": ..., "content": ...}]}
Json to_json(const StructuredProfile& p);
StructuredProfile profile_from_json(const Json& j);

// {"question", "answer", "addressed", "position"}
Json to_json(const QAPair& qa);
QAPair qa_from_json(const Json& j);

Json to_json(const TagRanking& r);

// questioner.jsonl row: source_id, step, input_profile, history, mode, target_question
Json to_json(const TrainingExample& row);
TrainingExample training_example_from_json(const Json& j);

// simulator.jsonl row: source_id, question, full_profile, target_answer, target_addressed
Json to_json(const SimulatorExample& row);
SimulatorExample simulator_example_from_json(const Json& j);

// Transcript row: source_id, turns, termination, question_count, mode,
// reconstructed, target. Debug data is not included.
Json to_json(const Transcript& t);
Transcript transcript_from_json(const Json& j);

// One transcript turn: {question, answer, addressed, no_preference}
Json turn_to_json(const QAPair& qa);

// Debug channel for a transcript: per-turn wall clock and raw policy output.
Json debug_to_json(const Transcript& t);

// One compact JSON document per line, '\n' terminated.
std::string to_jsonl(std::span<const Json> rows);
void write_jsonl(const std::filesystem::path& path, std::span<const Json> rows);
void write_text(const std::filesystem::path& path, const std::string& text);
std::vector<Json> read_jsonl(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace elicit
