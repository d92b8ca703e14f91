#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace elicit {

std::string trim(std::string_view s);

// ASCII case fold; bytes >= 0x80 pass through unchanged.
std::string to_lower(std::string_view s);

// Trim, collapse internal whitespace runs to one space, case-fold. Used for
// every equality test on tags, contents and questions.
std::string normalize_text(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

}  // namespace elicit
