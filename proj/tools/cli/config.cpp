#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace cli {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
           c == '-';
  });
}

}  // namespace

const std::string* ParsedConfig::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig out;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    // Comments run to end of line; values therefore cannot contain '#'.
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string body = trim(line);
    if (body.empty()) continue;

    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected `key = value`");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key)) {
      throw ParseError(line_no, "invalid key `" + key + "`");
    }
    if (value.empty()) {
      throw ParseError(line_no, "empty value for key `" + key + "`");
    }
    if (out.find(key) != nullptr) {
      throw ParseError(line_no, "duplicate key `" + key + "`");
    }
    out.entries.emplace_back(key, value);
  }
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(0, "cannot read config file `" + path + "`");
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace cli
