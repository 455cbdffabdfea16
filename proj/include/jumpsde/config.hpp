#pragma once

// Flat key-value experiment files with [sections]. Comments start with '#' or
// ';'. Every error names the offending line.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jumpsde/error.hpp"

namespace jumpsde {

class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// section -> key -> entry. Keys outside any section go to "experiment".
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text, std::string source = "<config>") {
    ConfigFile out;
    out.source_ = std::move(source);
    std::string section = "experiment";
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
      line = trim(line);
      if (line.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) out.fail(line_no, "malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!valid_name(section)) out.fail(line_no, "invalid section name '" + section + "'");
        out.sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) out.fail(line_no, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (!valid_name(key)) out.fail(line_no, "invalid key '" + key + "'");
      auto& sec = out.sections_[section];
      if (sec.count(key)) {
        out.fail(line_no, "duplicate key '" + key + "' (first set on line " +
                              std::to_string(sec.at(key).line) + ")");
      }
      sec[key] = {value, line_no};
    }
    return out;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const {
    return sections_;
  }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

 private:
  static std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  static bool valid_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '_' || c == '-' || c == '.';
      if (!ok) return false;
    }
    return true;
  }

  std::string source_;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

// ---------------------------------------------------------------------------
// Value parsing shared by config files and command-line flags.

inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(what + ": '" + std::string(s) + "' is not a number");
  return v;
}

inline std::int64_t parse_integer(std::string_view s, const std::string& what) {
  // Accept exact integers written in floating notation, e.g. 1e4.
  const double v = parse_double(s, what);
  if (v != static_cast<double>(static_cast<std::int64_t>(v))) {
    throw ConfigError(what + ": '" + std::string(s) + "' is not an integer");
  }
  return static_cast<std::int64_t>(v);
}

inline bool parse_bool(std::string_view s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(what + ": '" + std::string(s) + "' is not a boolean");
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    std::string_view item = s.substr(pos, end - pos);
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string_view::npos) out.emplace_back(item.substr(b, e - b + 1));
    pos = end + 1;
  }
  return out;
}

inline std::vector<double> parse_double_list(std::string_view s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

inline std::vector<int> parse_int_list(std::string_view s, const std::string& what) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(static_cast<int>(parse_integer(item, what)));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

}  // namespace jumpsde
