#pragma once

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bk::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum class Format { Json, Csv, Text };

Format parse_format(const std::string& s);

struct RunConfig {
  std::uint64_t seed = 20240101;
  std::size_t reps = 100000;
  Format format = Format::Json;
  std::optional<std::string> out;
  bool timestamp = true;
  std::map<std::string, double> tolerances; //!< overrides by result name
};

//! One reported quantity, optionally checked against an expectation.
struct ResultEntry {
  std::string name;
  json value;
  std::optional<json> expected;
  std::optional<double> tolerance;
  std::optional<std::string> provenance; //!< "[PAPER]", "[DERIVED]" or "[TRIVIAL]"
  std::optional<bool> pass;
  std::optional<std::string> note;

  bool operator==(const ResultEntry&) const = default;
};

struct Report {
  std::string command;
  json inputs = json::object();
  std::vector<ResultEntry> results;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::optional<std::string> timestamp;

  //! Informational value.
  void add(std::string name, json value, std::optional<std::string> note = std::nullopt);
  //! Numeric expectation |value - expected| <= tolerance; the tolerance may be overridden by
  //! name through the run configuration.
  void expect(std::string name, double value, double expected, double tolerance,
              std::string provenance, const RunConfig& config,
              std::optional<std::string> note = std::nullopt);
  //! Boolean expectation.
  void expect_true(std::string name, bool value, std::string provenance,
                   std::optional<std::string> note = std::nullopt);

  bool all_pass() const;
  std::vector<const ResultEntry*> failures() const;

  bool operator==(const Report&) const = default;
};

json to_json(const Report& r);
Report report_from_json(const json& j);

std::string render(const Report& r, Format f);
std::string render(const std::vector<Report>& rs, Format f);

//! Failing expectations as an aligned table.
std::string diff_table(const std::vector<Report>& rs);

std::string utc_timestamp();

} // namespace bk::cli
