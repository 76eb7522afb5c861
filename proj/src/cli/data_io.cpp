#include "bk/cli/data_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bk::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::vector<double> parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON data: ") + e.what(), line_of_offset(text, e.byte));
  }
  if (!j.is_array()) throw ParseError("JSON data must be an array of numbers", 1);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError("JSON data element " + std::to_string(i) + " is not a number", 0);
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

} // namespace

std::vector<double> parse_observations(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') return parse_json(text);
  std::vector<double> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool seen_content = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty()) continue;
    double v = 0.0;
    if (parse_number(s, v)) {
      out.push_back(v);
    } else if (!seen_content && s.find(',') == std::string::npos) {
      // Header line.
    } else {
      throw ParseError("line " + std::to_string(line) + ": not a single numeric value: " + s, line);
    }
    seen_content = true;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open data file " + path, 0);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<double> read_observations(const std::string& path) {
  return parse_observations(read_file(path));
}

} // namespace bk::cli
