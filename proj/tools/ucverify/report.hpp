#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace ucverify {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;  // empty, or the reason for a failure entry
};

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct SuiteResult {
  std::string command;
  std::deque<Check> checks;
  std::deque<Table> tables;
  std::vector<std::string> log;  // skipped items and other notes

  Check& check(std::string name, bool pass, double value, double tolerance, std::string detail = {});
  // value <= tolerance
  Check& at_most(std::string name, double value, double tolerance);
  Table& table(std::string name, std::vector<std::string> columns);
  bool passed() const;
  int failures() const;
};

constexpr int kCsvSchemaVersion = 1;

// 12 significant digits in scientific notation; nan and inf spelled out.
std::string format_number(double v);
std::string to_csv(const Table& t);
std::string summary_json(const SuiteResult& r);

// <dir>/<command>_<table>.csv and <dir>/<command>_summary.json
void write_outputs(const SuiteResult& r, const std::filesystem::path& dir);

}  // namespace ucverify
