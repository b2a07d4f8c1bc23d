#pragma once

// The experiment runner behind the CLI: one function per subcommand, each
// reading an ExperimentConfig and returning a Report with tables, gates and
// verdicts.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermolim/lab/config.hpp"
#include "thermolim/lab/report.hpp"

namespace thermolim::lab {

struct RunOptions {
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the config's seed key when set
};

const std::vector<std::string>& experiment_names();
/// One-line description for help output.
const std::string& experiment_summary(const std::string& name);
/// Key table of an experiment; ConfigError for an unknown name.
std::vector<KeySpec> experiment_schema(const std::string& name);
ExperimentConfig default_config(const std::string& name);

Report run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace thermolim::lab
