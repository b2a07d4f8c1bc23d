// thermolim <subcommand> --config <path> --out <dir> [--threads N] [--seed S]
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 gate or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "thermolim/errors.hpp"
#include "thermolim/kernels.hpp"
#include "thermolim/lab/experiments.hpp"

namespace lab = thermolim::lab;

namespace {

struct Args {
  std::string config;
  std::string out = ".";
  std::size_t threads = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool print_config = false;
};

int run(const std::string& name, const Args& a) {
  auto schema = lab::experiment_schema(name);
  lab::ExperimentConfig cfg = a.config.empty() ? lab::ExperimentConfig(name, schema)
                                               : lab::ExperimentConfig::load(name, schema, a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw thermolim::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.print_config) {
    for (const auto& [k, v] : cfg.resolved()) std::cout << k << " = " << v << "\n";
    return 0;
  }
  lab::RunOptions opt;
  opt.threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  opt.seed = a.seed;
  const lab::Report rep = lab::run_experiment(cfg, opt);
  for (const auto& p : rep.write(a.out)) std::cerr << "wrote " << p.string() << "\n";
  for (const auto& g : rep.gates())
    if (!g.ok) std::cerr << "gate failed: " << g.name << (g.detail.empty() ? "" : ": " + g.detail) << "\n";
  for (const auto& v : rep.verdicts())
    std::cout << v.status << "  " << v.name << (v.detail.empty() ? "" : "  (" + v.detail + ")") << "\n";
  return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermolim: trapped Bose gas thermodynamic-limit experiments"};
  app.require_subcommand(1);
  Args args;
  std::string chosen;
  for (const auto& name : lab::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, lab::experiment_summary(name));
    sub->add_option("--config", args.config, "key = value config file (defaults apply to missing keys)");
    sub->add_option("--out", args.out, "output directory for CSV and JSON");
    sub->add_option("--threads", args.threads, "worker threads (default: hardware concurrency)");
    sub->add_option("--seed", args.seed, "RNG seed override");
    sub->add_option("--set", args.overrides, "override a config key, key=value (repeatable)");
    sub->add_flag("--print-config", args.print_config, "print the resolved config and exit");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  std::cerr << "kernels: " << thermolim::kernels::backend_name(thermolim::kernels::active_backend()) << "\n";
  try {
    return run(chosen, args);
  } catch (const thermolim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const thermolim::GateError& e) {
    std::cerr << "gate error: " << e.what() << "\n";
    return 2;
  } catch (const thermolim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
