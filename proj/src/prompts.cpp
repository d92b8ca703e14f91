#include "elicit/prompts.hpp"

#include "elicit/errors.hpp"

namespace elicit::prompts {
namespace {

// Reconstructed templates: the original prompts were never published, so these
// are written from the task descriptions and kept under version ids.
const std::vector<PromptTemplate>& registry() {
  static const std::vector<PromptTemplate> templates = {
      {std::string(kStructure), "structurer", R"(You convert a free-text user profile into structured JSON.
Extract every distinct preference as a tag (a short concept name such as "Genre" or "Directors")
and its content (a sentence describing the user's preference, grounded in the text).
Tags must be unique. Do not invent information that is not in the text.

Respond with JSON only, in exactly this shape:
{"entries": [{"tag": "...", "content": "..."}]}

User profile:
{{profile_text}})"},
      {std::string(kRank), "ranker", R"(Rank the following profile tags from the most general concept to the most specific one.
For example, in the movie domain "Genre" is more general than "Directors".
Return every tag exactly once, spelled exactly as given.

Respond with a JSON array of strings only.

Tags:
{{tags}}

Profile:
{{profile_json}})"},
      {std::string(kFunnel), "generator", R"(Write funnel clarifying questions that would reveal this user profile in a conversation.
Start from broad concepts and move to specific ones, following the tag ranking (most general first).
A question may cover several tags, and a tag may need more than one question, but every tag must be
covered by at least one question. The answer is what this user would reply, derived from the profile.

Respond with a JSON array only, one object per question, in asking order:
[{"question": "...", "answer": "...", "addressed": ["<tag>", ...]}]

Tag ranking (general to specific):
{{ranking}}

Profile:
{{profile_json}})"},
      {std::string(kQuestion), "questioner", R"(You are eliciting a user's movie preferences by asking one clarifying question at a time.
Ask broad questions first and more specific ones later. Never ask about something already known.
{{history_block}}
Known profile so far:
{{profile_json}}

Respond with the next question only.)"},
      {std::string(kAnswer), "answerer", R"(You are a user answering a clarifying question. Your preferences are in the profile below.
Find the answer in the profile if possible. If the profile has no related information, answer "I don't know".
Also list the profile tags your answer is based on.

Respond with JSON only: {"answer": "...", "addressed": ["<tag>", ...]}

Profile:
{{profile_json}}

Question: {{question}})"},
      {std::string(kInterpret), "interpreter", R"(A user answered a clarifying question. Decide which entries of the reference profile the
answer expresses. Only list tags whose content the answer actually states; if none, return an empty list.

Respond with JSON only: {"addressed": ["<tag>", ...]}

Reference profile:
{{profile_json}}

Question: {{question}}
Answer: {{reply}})"},
  };
  return templates;
}

}  // namespace

const PromptTemplate& find(std::string_view id) {
  for (const PromptTemplate& t : registry()) {
    if (t.id == id) return t;
  }
  throw ConfigError("unknown prompt template id '" + std::string(id) + "'");
}

std::vector<std::string> ids() {
  std::vector<std::string> out;
  for (const PromptTemplate& t : registry()) out.push_back(t.id);
  return out;
}

std::string render(std::string_view id, const std::map<std::string, std::string>& vars) {
  const std::string& text = find(id).text;
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    std::size_t close = text.find("}}", open + 2);
    if (close == std::string::npos) throw ConfigError("unterminated placeholder in prompt " + std::string(id));
    out.append(text, pos, open - pos);
    std::string name = text.substr(open + 2, close - open - 2);
    auto it = vars.find(name);
    if (it == vars.end()) {
      throw ConfigError("prompt " + std::string(id) + " needs a value for {{" + name + "}}");
    }
    out += it->second;
    pos = close + 2;
  }
  return out;
}

}  // namespace elicit::prompts
