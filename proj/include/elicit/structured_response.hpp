#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace elicit {

// Extracts a JSON value from LLM output: strips code fences and any prose
// around the outermost object/array, tries a strict parse, then one repair pass
// (trailing commas dropped, single-quoted strings rewritten). Throws ParseError
// carrying the original text.
nlohmann::json parse_structured_response(std::string_view text);

// The repair pass on its own.
std::string repair_json(std::string_view text);

}  // namespace elicit
