#include "elicit/codec.hpp"

#include <fstream>
#include <sstream>

#include "elicit/errors.hpp"

namespace elicit {
namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw ValidationError(std::string("expected a JSON object with '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw ValidationError(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::size_t size_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError(std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Json to_json(std::span<const Entry> entries) {
  Json arr = Json::array();
  for (const Entry& e : entries) {
    Json o = Json::object();
    o["tag"] = e.tag;
    o["content"] = e.content;
    arr.push_back(std::move(o));
  }
  return arr;
}

Entries entries_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("entries must be a JSON array");
  Entries out;
  for (const Json& e : j) out.push_back(Entry{string_field(e, "tag"), string_field(e, "content")});
  return out;
}

Json to_json(const StructuredProfile& p) {
  Json o = Json::object();
  o["source_id"] = p.source_id();
  o["entries"] = to_json(std::span<const Entry>(p.entries()));
  return o;
}

StructuredProfile profile_from_json(const Json& j) {
  std::string id = j.is_object() && j.contains("source_id") ? string_field(j, "source_id") : "";
  return StructuredProfile(std::move(id), entries_from_json(field(j, "entries")));
}

Json to_json(const QAPair& qa) {
  Json o = Json::object();
  o["question"] = qa.question;
  o["answer"] = qa.answer;
  o["addressed"] = to_json(std::span<const Entry>(qa.addressed));
  o["position"] = qa.position;
  return o;
}

QAPair qa_from_json(const Json& j) {
  return QAPair{string_field(j, "question"), string_field(j, "answer"),
                entries_from_json(field(j, "addressed")), size_field(j, "position")};
}

Json to_json(const TagRanking& r) { return Json(r.tags); }

Json to_json(const TrainingExample& row) {
  Json o = Json::object();
  o["source_id"] = row.source_id;
  o["step"] = row.step;
  Json profile = Json::object();
  profile["source_id"] = row.source_id;
  profile["entries"] = to_json(std::span<const Entry>(row.input_state.entries));
  o["input_profile"] = std::move(profile);
  Json history = Json::array();
  for (const QAPair& qa : row.input_state.history) history.push_back(to_json(qa));
  o["history"] = std::move(history);
  o["mode"] = std::string(to_string(row.input_state.mode));
  o["target_question"] = row.target_question;
  return o;
}

TrainingExample training_example_from_json(const Json& j) {
  TrainingExample row;
  row.source_id = string_field(j, "source_id");
  row.step = size_field(j, "step");
  row.input_state.entries = entries_from_json(field(field(j, "input_profile"), "entries"));
  const Json& history = field(j, "history");
  if (!history.is_array()) throw ValidationError("history must be an array");
  for (const Json& h : history) row.input_state.history.push_back(qa_from_json(h));
  row.input_state.mode = parse_update_mode(string_field(j, "mode"));
  row.target_question = string_field(j, "target_question");
  return row;
}

Json to_json(const SimulatorExample& row) {
  Json o = Json::object();
  o["source_id"] = row.source_id;
  o["question"] = row.question;
  o["full_profile"] = to_json(row.full_profile);
  o["target_answer"] = row.target_answer;
  o["target_addressed"] = to_json(std::span<const Entry>(row.target_addressed));
  return o;
}

SimulatorExample simulator_example_from_json(const Json& j) {
  return SimulatorExample{string_field(j, "source_id"), string_field(j, "question"),
                          profile_from_json(field(j, "full_profile")),
                          string_field(j, "target_answer"),
                          entries_from_json(field(j, "target_addressed"))};
}

Json turn_to_json(const QAPair& qa) {
  Json o = Json::object();
  o["question"] = qa.question;
  o["answer"] = qa.answer;
  o["addressed"] = to_json(std::span<const Entry>(qa.addressed));
  o["no_preference"] = qa.is_no_preference();
  return o;
}

Json to_json(const Transcript& t) {
  Json o = Json::object();
  o["source_id"] = t.target.source_id();
  Json turns = Json::array();
  for (const QAPair& qa : t.turns) turns.push_back(turn_to_json(qa));
  o["turns"] = std::move(turns);
  o["termination"] = std::string(to_string(t.termination));
  o["question_count"] = t.question_count;
  o["mode"] = std::string(to_string(t.reconstructed.mode));
  Json rec = Json::object();
  rec["source_id"] = t.target.source_id();
  rec["entries"] = to_json(std::span<const Entry>(t.reconstructed.entries));
  o["reconstructed"] = std::move(rec);
  o["target"] = to_json(t.target);
  return o;
}

Transcript transcript_from_json(const Json& j) {
  Transcript t;
  t.target = profile_from_json(field(j, "target"));
  const Json& turns = field(j, "turns");
  if (!turns.is_array()) throw ValidationError("turns must be an array");
  for (const Json& turn : turns) {
    QAPair qa{string_field(turn, "question"), string_field(turn, "answer"),
              entries_from_json(field(turn, "addressed")), t.turns.size()};
    t.turns.push_back(std::move(qa));
  }
  t.termination = parse_termination(string_field(j, "termination"));
  t.question_count = size_field(j, "question_count");
  if (t.question_count != t.turns.size()) {
    throw ValidationError("question_count does not match the number of turns");
  }
  t.reconstructed.mode = parse_update_mode(string_field(j, "mode"));
  t.reconstructed.entries = entries_from_json(field(field(j, "reconstructed"), "entries"));
  t.reconstructed.history = t.turns;
  return t;
}

Json debug_to_json(const Transcript& t) {
  Json o = Json::object();
  o["source_id"] = t.target.source_id();
  Json turns = Json::array();
  for (const TurnDebug& d : t.debug) {
    Json row = Json::object();
    row["elapsed_ms"] = d.elapsed_ms;
    row["questioner_output"] = d.questioner_output;
    row["simulator_output"] = d.simulator_output;
    turns.push_back(std::move(row));
  }
  o["turns"] = std::move(turns);
  return o;
}

std::string to_jsonl(std::span<const Json> rows) {
  std::string out;
  for (const Json& row : rows) {
    out += row.dump();
    out.push_back('\n');
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_jsonl(const std::filesystem::path& path, std::span<const Json> rows) {
  write_text(path, to_jsonl(rows));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<Json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace elicit
