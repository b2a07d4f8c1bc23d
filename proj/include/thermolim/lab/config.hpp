#pragma once

// Flat `key = value` experiment configuration. Lists are comma-separated,
// `#` starts a comment. Every experiment declares its keys with defaults;
// unknown or repeated keys are ConfigErrors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thermolim::lab {

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string doc;
};

class ExperimentConfig {
 public:
  ExperimentConfig(std::string experiment, std::vector<KeySpec> schema);

  static ExperimentConfig parse(std::string experiment, std::vector<KeySpec> schema,
                                std::string_view text);
  static ExperimentConfig load(std::string experiment, std::vector<KeySpec> schema,
                               const std::filesystem::path& path);

  const std::string& experiment() const { return experiment_; }
  const std::vector<KeySpec>& schema() const { return schema_; }

  /// Overrides one key (validated against the schema).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long> integers(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;

  /// Every key in schema order with its resolved value.
  std::vector<std::pair<std::string, std::string>> resolved() const;

 private:
  std::size_t slot(const std::string& key) const;

  std::string experiment_;
  std::vector<KeySpec> schema_;
  std::vector<std::string> values_;
  std::vector<bool> explicit_;
};

/// "a, b ,c" -> {"a", "b", "c"}; empty input gives an empty list.
std::vector<std::string> split_list(std::string_view text);
double parse_real(std::string_view text, const std::string& key);

}  // namespace thermolim::lab
