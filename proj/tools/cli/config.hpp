#pragma once

// Flat `key = value` run-configuration files: one pair per line, `#` starts
// a comment, blank lines are ignored.  Duplicate keys are an error; key
// validity is the caller's business (each subcommand knows its own set).

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ParsedConfig {
  // Insertion-ordered; keys are unique.
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const;
};

ParsedConfig parse_config_text(const std::string& text);

// Reads the file (ParseError line 0 when unreadable) and parses it.
ParsedConfig parse_config_file(const std::string& path);

}  // namespace cli
