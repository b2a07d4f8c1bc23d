#include "thermolim/lab/report.hpp"

#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "thermolim/errors.hpp"

namespace thermolim::lab {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw UsageError("row width does not match table " + name);
  rows.push_back(std::move(row));
}

Report::Report(std::string experiment, std::vector<std::pair<std::string, std::string>> config)
    : experiment_(std::move(experiment)), config_(std::move(config)) {}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  for (auto& t : tables_)
    if (t.name == name) return t;
  tables_.push_back(Table{name, std::move(columns), {}});
  return tables_.back();
}

void Report::verdict(const std::string& name, bool pass, const std::string& detail) {
  verdicts_.push_back({name, pass ? "pass" : "fail", detail});
}

void Report::verdict_status(const std::string& name, const std::string& status, const std::string& detail) {
  verdicts_.push_back({name, status, detail});
}

void Report::gate(const std::string& name, bool ok, const std::string& detail) {
  gates_.push_back({name, ok, detail});
}

bool Report::gates_ok() const {
  for (const auto& g : gates_)
    if (!g.ok) return false;
  return true;
}

std::vector<Verdict> Report::verdicts() const {
  std::vector<Verdict> out = verdicts_;
  if (!gates_ok())
    for (auto& v : out)
      if (v.status == "pass") v.status = "invalid-gate";
  return out;
}

int Report::exit_code() const {
  if (!gates_ok()) return 2;
  for (const auto& v : verdicts())
    if (v.status == "invalid-gate") return 2;
  for (const auto& v : verdicts())
    if (v.status != "pass") return 1;
  return 0;
}

std::string Report::csv(const Table& t) const {
  std::ostringstream out;
  out << "# thermolim " << experiment_ << (t.name.empty() ? "" : " " + t.name) << " csv-v1\n";
  for (const auto& [k, v] : config_) out << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

std::string Report::summary_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment_;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_) j["config"][k] = v;
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts())
    j["verdicts"].push_back({{"name", v.name}, {"status", v.status}, {"detail", v.detail}});
  j["gates"] = nlohmann::ordered_json::array();
  for (const auto& g : gates_) j["gates"].push_back({{"name", g.name}, {"ok", g.ok}, {"detail", g.detail}});
  j["notes"] = notes_;
  j["exit_code"] = exit_code();
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  for (const auto& t : tables_) {
    const auto p = dir / (experiment_ + (t.name.empty() ? "" : "_" + t.name) + ".csv");
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << csv(t);
    out.push_back(p);
  }
  const auto p = dir / (experiment_ + "_summary.json");
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << summary_json();
  out.push_back(p);
  return out;
}

}  // namespace thermolim::lab
