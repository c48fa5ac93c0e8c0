#include "config.hpp"
#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<int> level_override;
  std::optional<double> lin_tol_override;
};

void attach_options(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "experiment config file")->required();
  sub->add_option("--out", opts.out_dir, "output directory for report.csv");
  sub->add_option("--k", opts.level_override, "override the config's derivative level k");
  sub->add_option("--lin-tol", opts.lin_tol_override, "override the config's linear solver tolerance");
}

int run(hyperbreg::tools::Command command, const CommonOptions& opts) {
  using namespace hyperbreg::tools;
  try {
    ExperimentConfig config = parse_config_file(opts.config_path, command);
    if (opts.level_override) config.level = *opts.level_override;
    if (opts.lin_tol_override) config.lin_tol = *opts.lin_tol_override;
    run_experiment(config, opts.out_dir);
    return 0;
  } catch (const ConfigError& err) {
    std::cerr << "hyperbreg: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "hyperbreg: solver failure: " << err.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperbreg - Galerkin solver and experiment runner for second-order\n"
               "hyperbolic evolution equations with time-dependent coefficients"};
  app.require_subcommand(1);

  struct Entry {
    hyperbreg::tools::Command command;
    CommonOptions opts;
  };
  std::vector<std::pair<CLI::App*, Entry>> entries;

  const std::pair<const char*, hyperbreg::tools::Command> commands[] = {
      {"solve", hyperbreg::tools::Command::Solve},
      {"derivatives", hyperbreg::tools::Command::Derivatives},
      {"compat", hyperbreg::tools::Command::Compat},
      {"frechet-test", hyperbreg::tools::Command::FrechetTest},
      {"convergence", hyperbreg::tools::Command::Convergence},
      {"energy", hyperbreg::tools::Command::Energy},
  };

  entries.reserve(std::size(commands));
  for (const auto& [name, command] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    entries.emplace_back(sub, Entry{command, {}});
    attach_options(sub, entries.back().second.opts);
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, entry] : entries) {
    if (sub->parsed()) return run(entry.command, entry.opts);
  }
  return 2;
}
