#include "report.hpp"

#include "uc/error.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ucverify {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw uc::ShapeError(fmt::format("table {}: row has {} cells, expected {}", name, row.size(), columns.size()));
  rows.push_back(std::move(row));
}

Check& SuiteResult::check(std::string name, bool pass, double value, double tolerance, std::string detail) {
  checks.push_back({std::move(name), pass, value, tolerance, std::move(detail)});
  return checks.back();
}

Check& SuiteResult::at_most(std::string name, double value, double tolerance) {
  return check(std::move(name), value <= tolerance, value, tolerance);
}

Table& SuiteResult::table(std::string name, std::vector<std::string> columns) {
  tables.push_back({std::move(name), std::move(columns), {}});
  return tables.back();
}

bool SuiteResult::passed() const { return failures() == 0; }

int SuiteResult::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.11e}", v);
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out = fmt::format("# ucverify-csv v{} table={}\n", kCsvSchemaVersion, t.name);
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + quoted(t.columns[i]);
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (auto d = std::get_if<double>(&row[i])) {
        out += format_number(*d);
      } else if (auto l = std::get_if<long>(&row[i])) {
        out += std::to_string(*l);
      } else {
        out += quoted(std::get<std::string>(row[i]));
      }
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const SuiteResult& r) {
  auto number = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  nlohmann::ordered_json checks = nlohmann::ordered_json::object();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["pass"] = c.pass;
    e["value"] = number(c.value);
    e["tolerance"] = number(c.tolerance);
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks[c.name] = e;
  }
  nlohmann::ordered_json doc;
  doc["schema"] = kCsvSchemaVersion;
  doc["command"] = r.command;
  doc["passed"] = r.passed();
  doc["failures"] = r.failures();
  doc["checks"] = checks;
  doc["log"] = r.log;
  return doc.dump(2) + "\n";
}

void write_outputs(const SuiteResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw uc::Error(fmt::format("cannot write {}", p.string()));
    out << text;
  };
  for (const auto& t : r.tables) write(dir / fmt::format("{}_{}.csv", r.command, t.name), to_csv(t));
  write(dir / fmt::format("{}_summary.json", r.command), summary_json(r));
}

}  // namespace ucverify
