#include "elicit/structured_response.hpp"

#include <cctype>

#include "elicit/errors.hpp"
#include "elicit/text.hpp"

namespace elicit {
namespace {

std::string strip_fences(std::string_view text) {
  std::size_t fence = text.find("```");
  if (fence == std::string_view::npos) return std::string(text);
  std::size_t body = text.find('\n', fence);
  if (body == std::string_view::npos) return std::string(text);
  std::size_t end = text.find("```", body + 1);
  if (end == std::string_view::npos) end = text.size();
  return std::string(text.substr(body + 1, end - body - 1));
}

// Outermost {...} or [...] span, scanning from the first opener.
std::string outermost_value(const std::string& text) {
  std::size_t start = text.find_first_of("{[");
  if (start == std::string::npos) return text;
  char open = text[start];
  char close = open == '{' ? '}' : ']';
  std::size_t end = text.rfind(close);
  if (end == std::string::npos || end < start) return text.substr(start);
  return text.substr(start, end - start + 1);
}

}  // namespace

std::string repair_json(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_double = false;
  bool in_single = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_double) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (c == '"') {
        in_double = false;
      }
      continue;
    }
    if (in_single) {
      if (c == '\\' && i + 1 < text.size()) {
        char next = text[++i];
        if (next == '\'') {
          out.push_back('\'');
        } else {
          out.push_back('\\');
          out.push_back(next);
        }
      } else if (c == '\'') {
        // apostrophe inside a word ("don't") stays literal
        bool word_before = i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]));
        bool word_after = i + 1 < text.size() && std::isalnum(static_cast<unsigned char>(text[i + 1]));
        if (word_before && word_after) {
          out.push_back('\'');
        } else {
          out.push_back('"');
          in_single = false;
        }
      } else if (c == '"') {
        out += "\\\"";
      } else {
        out.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_double = true;
      out.push_back(c);
    } else if (c == '\'') {
      in_single = true;
      out.push_back('"');
    } else if (c == ',') {
      std::size_t j = i + 1;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
      out.push_back(c);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

nlohmann::json parse_structured_response(std::string_view text) {
  const std::string candidate = outermost_value(trim(strip_fences(text)));
  try {
    return nlohmann::json::parse(candidate);
  } catch (const nlohmann::json::parse_error&) {
  }
  try {
    return nlohmann::json::parse(repair_json(candidate));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("unparseable structured response: ") + e.what(), std::string(text));
  }
}

}  // namespace elicit
