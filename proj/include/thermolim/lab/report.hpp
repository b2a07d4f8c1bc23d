#pragma once

// Experiment reports: tables written as CSV (resolved config echoed in a
// comment header), verdicts and gates mirrored into a JSON summary.

#include <deque>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace thermolim::lab {

/// Fixed-format number rendering used in every table (%.12g).
std::string num(double v);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Throws UsageError if the row width differs from the column count.
  void add(std::vector<std::string> row);
};

struct Verdict {
  std::string name;
  std::string status;  // pass, fail, inconclusive-floor, invalid-gate
  std::string detail;
};

struct Gate {
  std::string name;
  bool ok = true;
  std::string detail;
};

class Report {
 public:
  Report(std::string experiment, std::vector<std::pair<std::string, std::string>> config);

  const std::string& experiment() const { return experiment_; }
  Table& table(const std::string& name, std::vector<std::string> columns);
  const std::deque<Table>& tables() const { return tables_; }

  void verdict(const std::string& name, bool pass, const std::string& detail = {});
  void verdict_status(const std::string& name, const std::string& status, const std::string& detail = {});
  void gate(const std::string& name, bool ok, const std::string& detail = {});
  void note(const std::string& text) { notes_.push_back(text); }

  /// Verdicts after gate enforcement: any failed gate turns "pass" into "invalid-gate".
  std::vector<Verdict> verdicts() const;
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<std::string>& notes() const { return notes_; }
  bool gates_ok() const;

  /// 0 when every verdict passes, 2 when a gate failed, 1 otherwise.
  int exit_code() const;

  /// <dir>/<experiment>[_<table>].csv for each table and <dir>/<experiment>_summary.json.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir) const;
  std::string summary_json() const;
  std::string csv(const Table& t) const;

 private:
  std::string experiment_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::deque<Table> tables_;  // deque: table() hands out stable references
  std::vector<Verdict> verdicts_;
  std::vector<Gate> gates_;
  std::vector<std::string> notes_;
};

}  // namespace thermolim::lab
