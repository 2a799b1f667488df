#pragma once

// Report assembly shared by all subcommands: `# key = value` header echo,
// CSV body with shortest-round-trip numbers (byte-stable across runs), and a
// JSON mirror carrying the same field names.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cli {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

std::string format_cell(const Cell&);

struct Report {
  std::string command;
  // Resolved configuration, echoed verbatim in order.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Named auxiliary records (fit results, assert summaries); rendered as
  // trailing `# name k = v ...` comment lines in CSV and as objects in JSON.
  struct Aux {
    std::string name;
    std::vector<std::pair<std::string, Cell>> fields;
  };
  std::vector<Aux> aux;

  std::string to_csv() const;
  std::string to_json() const;
};

// Typed readers for resolved string parameters.  Errors are reported as
// std::runtime_error with the key named (callers map them to usage errors).
double to_double(const std::string& key, const std::string& value);
std::int64_t to_int(const std::string& key, const std::string& value);
std::uint64_t to_uint64(const std::string& key, const std::string& value);
bool to_bool(const std::string& key, const std::string& value);
std::vector<double> to_double_list(const std::string& key, const std::string& value);

}  // namespace cli
