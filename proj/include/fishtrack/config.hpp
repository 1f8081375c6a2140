#pragma once

#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "fishtrack/errors.hpp"
#include "fishtrack/mot_io.hpp"

namespace fishtrack {

/// Plain-text `key = value` file. `#` starts a comment; blank lines are
/// ignored; repeated keys are an error.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (!out.emplace(std::string(key), std::string(value)).second) {
      throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
    }
  }
  return out;
}

}  // namespace fishtrack
