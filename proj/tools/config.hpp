#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperbreg::tools {

enum class Command { Solve, Derivatives, Compat, FrechetTest, Convergence, Energy };

std::string to_string(Command command);
std::optional<Command> command_from_string(const std::string& name);

/// One experiment description, parsed from a flat key = value config file.
/// Recognized keys: case, k, mesh_sizes, step_counts, lin_tol, eps_list, T,
/// h_pert, a, f, u0, u1, a_min, command.  Inline cases (case = inline) define
/// the coefficient and data through the expression keys a/f/u0/u1.
struct ExperimentConfig {
  Command command = Command::Solve;
  std::string case_name;
  int level = 0;
  std::vector<int> mesh_sizes;
  std::vector<int> step_counts;
  double lin_tol = 1e-10;
  std::vector<double> eps_list;
  double horizon = 1.0;
  std::string h_pert;  // expression; required for frechet-test
  std::string a_expr;
  std::string f_expr = "0";
  std::string u0_expr = "0";
  std::string u1_expr = "0";
  double a_min = 1e-6;
};

/// Thrown for malformed or invalid configs; the CLI maps it to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parses the key = value file ('#' starts a comment).  Unknown keys are
/// errors.  `command` comes from the CLI; a `command` key in the file must
/// agree with it.
ExperimentConfig parse_config_file(const std::string& path, Command command);

ExperimentConfig parse_config_text(const std::string& text, Command command);

/// Semantic validation (list lengths, ranges, required keys per command).
/// Throws ConfigError with a descriptive message.
void validate_config(const ExperimentConfig& config);

/// The (mesh, steps) sweep ladder: zips mesh_sizes and step_counts, where a
/// length-1 list broadcasts against the other.
std::vector<std::pair<int, int>> sweep_ladder(const ExperimentConfig& config);

}  // namespace hyperbreg::tools
