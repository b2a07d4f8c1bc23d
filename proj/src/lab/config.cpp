#include "thermolim/lab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <fstream>
#include <sstream>

#include "thermolim/errors.hpp"

namespace thermolim::lab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  const std::string all = trim(text);
  if (all.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = all.find(',', start);
    out.push_back(trim(std::string_view(all).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view text, const std::string& key) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "': '" + s + "' is not a number");
  return v;
}

ExperimentConfig::ExperimentConfig(std::string experiment, std::vector<KeySpec> schema)
    : experiment_(std::move(experiment)), schema_(std::move(schema)) {
  for (const auto& k : schema_) values_.push_back(k.default_value);
  explicit_.assign(schema_.size(), false);
}

ExperimentConfig ExperimentConfig::parse(std::string experiment, std::vector<KeySpec> schema,
                                         std::string_view text) {
  ExperimentConfig cfg(std::move(experiment), std::move(schema));
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    const std::size_t i = cfg.slot(key);
    if (cfg.explicit_[i]) throw ConfigError("key '" + key + "' given twice");
    cfg.values_[i] = value;
    cfg.explicit_[i] = true;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(std::string experiment, std::vector<KeySpec> schema,
                                        const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(std::move(experiment), std::move(schema), buf.str());
}

std::size_t ExperimentConfig::slot(const std::string& key) const {
  for (std::size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name == key) return i;
  throw ConfigError("unknown key '" + key + "' for experiment " + experiment_);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::size_t i = slot(key);
  values_[i] = trim(value);
  explicit_[i] = true;
}

bool ExperimentConfig::has(const std::string& key) const {
  return std::any_of(schema_.begin(), schema_.end(), [&](const KeySpec& k) { return k.name == key; });
}

const std::string& ExperimentConfig::text(const std::string& key) const { return values_[slot(key)]; }

double ExperimentConfig::real(const std::string& key) const { return parse_real(text(key), key); }

long ExperimentConfig::integer(const std::string& key) const {
  const double v = real(key);
  if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<long>(v);
}

bool ExperimentConfig::flag(const std::string& key) const {
  const std::string& v = text(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split_list(text(key))) out.push_back(parse_real(w, key));
  return out;
}

std::vector<long> ExperimentConfig::integers(const std::string& key) const {
  std::vector<long> out;
  for (double v : reals(key)) {
    if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError("key '" + key + "' must list integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

std::vector<std::string> ExperimentConfig::words(const std::string& key) const {
  return split_list(text(key));
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < schema_.size(); ++i) out.emplace_back(schema_[i].name, values_[i]);
  return out;
}

}  // namespace thermolim::lab
