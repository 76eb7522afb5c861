#include "bk/cli/report.hpp"

#include "bk/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace bk::cli {

namespace {

// JSON has no encoding for non-finite numbers.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "text") return Format::Text;
  throw DomainError("unknown output format: " + s);
}

void Report::add(std::string name, json value, std::optional<std::string> note) {
  if (value.is_number_float()) value = number(value.get<double>());
  ResultEntry e;
  e.name = std::move(name);
  e.value = std::move(value);
  e.note = std::move(note);
  results.push_back(std::move(e));
}

void Report::expect(std::string name, double value, double expected, double tolerance,
                    std::string provenance, const RunConfig& config,
                    std::optional<std::string> note) {
  if (const auto it = config.tolerances.find(name); it != config.tolerances.end()) {
    tolerance = it->second;
  }
  ResultEntry e;
  e.name = std::move(name);
  e.value = number(value);
  e.expected = number(expected);
  e.tolerance = tolerance;
  e.provenance = std::move(provenance);
  e.pass = std::fabs(value - expected) <= tolerance;
  e.note = std::move(note);
  results.push_back(std::move(e));
}

void Report::expect_true(std::string name, bool value, std::string provenance,
                         std::optional<std::string> note) {
  ResultEntry e;
  e.name = std::move(name);
  e.value = value;
  e.expected = true;
  e.provenance = std::move(provenance);
  e.pass = value;
  e.note = std::move(note);
  results.push_back(std::move(e));
}

bool Report::all_pass() const {
  return std::all_of(results.begin(), results.end(),
                     [](const ResultEntry& e) { return !e.pass || *e.pass; });
}

std::vector<const ResultEntry*> Report::failures() const {
  std::vector<const ResultEntry*> out;
  for (const auto& e : results) {
    if (e.pass && !*e.pass) out.push_back(&e);
  }
  return out;
}

json to_json(const Report& r) {
  json j;
  j["command"] = r.command;
  j["inputs"] = r.inputs;
  json results = json::array();
  for (const auto& e : r.results) {
    json o;
    o["name"] = e.name;
    o["value"] = e.value;
    if (e.expected) o["expected"] = *e.expected;
    if (e.tolerance) o["tolerance"] = *e.tolerance;
    if (e.provenance) o["provenance"] = *e.provenance;
    if (e.pass) o["pass"] = *e.pass;
    if (e.note) o["note"] = *e.note;
    results.push_back(std::move(o));
  }
  j["results"] = std::move(results);
  j["seed"] = r.seed;
  j["version"] = r.version;
  if (r.timestamp) j["timestamp"] = *r.timestamp;
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  r.command = j.at("command").get<std::string>();
  r.inputs = j.at("inputs");
  for (const auto& o : j.at("results")) {
    ResultEntry e;
    e.name = o.at("name").get<std::string>();
    e.value = o.at("value");
    if (o.contains("expected")) e.expected = o.at("expected");
    if (o.contains("tolerance")) e.tolerance = o.at("tolerance").get<double>();
    if (o.contains("provenance")) e.provenance = o.at("provenance").get<std::string>();
    if (o.contains("pass")) e.pass = o.at("pass").get<bool>();
    if (o.contains("note")) e.note = o.at("note").get<std::string>();
    r.results.push_back(std::move(e));
  }
  r.seed = j.at("seed").get<std::uint64_t>();
  r.version = j.at("version").get<std::string>();
  if (j.contains("timestamp")) r.timestamp = j.at("timestamp").get<std::string>();
  return r;
}

std::string render(const Report& r, Format f) { return render(std::vector<Report>{r}, f); }

std::string render(const std::vector<Report>& rs, Format f) {
  std::ostringstream os;
  switch (f) {
  case Format::Json: {
    if (rs.size() == 1) {
      os << to_json(rs.front()).dump(2) << "\n";
    } else {
      json arr = json::array();
      for (const auto& r : rs) arr.push_back(to_json(r));
      os << arr.dump(2) << "\n";
    }
    break;
  }
  case Format::Csv:
    os << "command,name,value\n";
    for (const auto& r : rs) {
      for (const auto& e : r.results) {
        os << csv_escape(r.command) << "," << csv_escape(e.name) << "," << csv_escape(cell(e.value))
           << "\n";
      }
    }
    break;
  case Format::Text:
    for (const auto& r : rs) {
      os << "== " << r.command << " (seed " << r.seed << ")\n";
      for (const auto& e : r.results) {
        os << "  " << std::left << std::setw(34) << e.name << " " << std::setw(24) << cell(e.value);
        if (e.expected) {
          os << " expected " << cell(*e.expected);
          if (e.tolerance) os << " +- " << *e.tolerance;
        }
        if (e.provenance) os << " " << *e.provenance;
        if (e.pass) os << (*e.pass ? " ok" : " FAIL");
        if (e.note) os << "  (" << *e.note << ")";
        os << "\n";
      }
    }
    break;
  }
  return os.str();
}

std::string diff_table(const std::vector<Report>& rs) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "command" << std::setw(34) << "name" << std::setw(24)
     << "value" << std::setw(24) << "expected" << "tolerance\n";
  for (const auto& r : rs) {
    for (const auto* e : r.failures()) {
      os << std::left << std::setw(28) << r.command << std::setw(34) << e->name << std::setw(24)
         << cell(e->value) << std::setw(24) << (e->expected ? cell(*e->expected) : "")
         << (e->tolerance ? std::to_string(*e->tolerance) : "") << "\n";
    }
  }
  return os.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

} // namespace bk::cli
