#include "format.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace cli {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "# command = " << command << "\n";
  for (const auto& [key, value] : config) {
    out << "# " << key << " = " << value << "\n";
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ",";
    out << columns[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      out << format_cell(row[i]);
    }
    out << "\n";
  }
  for (const auto& record : aux) {
    out << "# " << record.name;
    for (const auto& [key, value] : record.fields) {
      out << " " << key << " = " << format_cell(value);
    }
    out << "\n";
  }
  return out.str();
}

std::string Report::to_json() const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config) cfg[key] = value;
  doc["config"] = std::move(cfg);

  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < columns.size() && i < row.size(); ++i) {
      std::visit([&](const auto& v) { obj[columns[i]] = v; }, row[i]);
    }
    rows_json.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows_json);

  if (!aux.empty()) {
    nlohmann::ordered_json aux_json = nlohmann::ordered_json::array();
    for (const auto& record : aux) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      obj["name"] = record.name;
      for (const auto& [key, value] : record.fields) {
        std::visit([&](const auto& v) { obj[key] = v; }, value);
      }
      aux_json.push_back(std::move(obj));
    }
    doc["aux"] = std::move(aux_json);
  }
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw std::runtime_error("parameter `" + key + "`: expected " + expected +
                           ", got `" + value + "`");
}

}  // namespace

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto result = std::from_chars(begin, end, out);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(out)) {
    bad_value(key, value, "a finite number");
  }
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto result = std::from_chars(begin, end, out);
  if (result.ec != std::errc() || result.ptr != end) {
    bad_value(key, value, "an integer");
  }
  return out;
}

std::uint64_t to_uint64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto result = std::from_chars(begin, end, out);
  if (result.ec != std::errc() || result.ptr != end) {
    bad_value(key, value, "an unsigned integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  bad_value(key, value, "a boolean (0/1/true/false)");
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::size_t end = comma == std::string::npos ? value.size() : comma;
    std::string item = value.substr(start, end - start);
    // Trim spaces around list items.
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (item.empty()) bad_value(key, value, "a comma-separated number list");
    out.push_back(to_double(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) bad_value(key, value, "a non-empty number list");
  return out;
}

}  // namespace cli
