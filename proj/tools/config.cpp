#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hyperbreg::tools {

std::string to_string(Command command) {
  switch (command) {
    case Command::Solve: return "solve";
    case Command::Derivatives: return "derivatives";
    case Command::Compat: return "compat";
    case Command::FrechetTest: return "frechet-test";
    case Command::Convergence: return "convergence";
    case Command::Energy: return "energy";
  }
  return "?";
}

std::optional<Command> command_from_string(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "derivatives") return Command::Derivatives;
  if (name == "compat") return Command::Compat;
  if (name == "frechet-test") return Command::FrechetTest;
  if (name == "convergence") return Command::Convergence;
  if (name == "energy") return Command::Energy;
  return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: bad floating value for '" + key + "': '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int out = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': '" + value + "'");
  }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
  std::vector<T> out;
  std::string item;
  std::istringstream stream(value);
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: empty list entry for '" + key + "'");
    out.push_back(parse(key, item));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, Command command) {
  ExperimentConfig config;
  config.command = command;

  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_number) +
                        " is not a key = value pair");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "case") {
      config.case_name = value;
    } else if (key == "k") {
      config.level = parse_int(key, value);
    } else if (key == "mesh_sizes") {
      config.mesh_sizes = parse_list<int>(key, value, parse_int);
    } else if (key == "step_counts") {
      config.step_counts = parse_list<int>(key, value, parse_int);
    } else if (key == "lin_tol") {
      config.lin_tol = parse_double(key, value);
    } else if (key == "eps_list") {
      config.eps_list = parse_list<double>(key, value, parse_double);
    } else if (key == "T") {
      config.horizon = parse_double(key, value);
    } else if (key == "h_pert") {
      config.h_pert = value;
    } else if (key == "a") {
      config.a_expr = value;
    } else if (key == "f") {
      config.f_expr = value;
    } else if (key == "u0") {
      config.u0_expr = value;
    } else if (key == "u1") {
      config.u1_expr = value;
    } else if (key == "a_min") {
      config.a_min = parse_double(key, value);
    } else if (key == "command") {
      const auto given = command_from_string(value);
      if (!given) throw ConfigError("config: unknown command '" + value + "'");
      if (*given != command) {
        throw ConfigError("config: command key '" + value + "' conflicts with CLI command '" +
                          to_string(command) + "'");
      }
    } else {
      throw ConfigError("config: unknown key '" + key + "' on line " +
                        std::to_string(line_number));
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), command);
}

void validate_config(const ExperimentConfig& config) {
  if (config.case_name.empty()) throw ConfigError("config: missing 'case'");
  if (config.level < 0 || config.level > 4) {
    throw ConfigError("config: k must be in [0, 4]");
  }
  if (!(config.lin_tol > 0.0) || config.lin_tol > 1e-4) {
    throw ConfigError("config: lin_tol must lie in (0, 1e-4]");
  }
  if (config.mesh_sizes.empty()) throw ConfigError("config: mesh_sizes must be non-empty");
  if (config.step_counts.empty()) throw ConfigError("config: step_counts must be non-empty");
  for (int m : config.mesh_sizes) {
    if (m < 1) throw ConfigError("config: mesh sizes must be >= 1");
  }
  for (int n : config.step_counts) {
    if (n < 2) throw ConfigError("config: step counts must be >= 2");
  }
  if (!(config.horizon > 0.0)) throw ConfigError("config: T must be > 0");

  if (config.command == Command::FrechetTest) {
    if (config.h_pert.empty()) {
      throw ConfigError("config: frechet-test requires 'h_pert'");
    }
    if (config.eps_list.size() < 3) {
      throw ConfigError("config: frechet-test requires eps_list with >= 3 entries");
    }
    for (size_t i = 0; i + 1 < config.eps_list.size(); ++i) {
      if (!(config.eps_list[i] > config.eps_list[i + 1])) {
        throw ConfigError("config: eps_list must be strictly decreasing");
      }
    }
    if (config.eps_list.back() <= 0.0) {
      throw ConfigError("config: eps_list entries must be positive");
    }
  }
  if (config.case_name == "inline" && config.a_expr.empty()) {
    throw ConfigError("config: inline case requires 'a'");
  }
  if (config.case_name == "inline" && !(config.a_min > 0.0)) {
    throw ConfigError("config: a_min must be > 0");
  }

  const auto ladder_m = config.mesh_sizes.size();
  const auto ladder_n = config.step_counts.size();
  if (ladder_m != ladder_n && ladder_m != 1 && ladder_n != 1) {
    throw ConfigError("config: mesh_sizes and step_counts must zip (equal length or length 1)");
  }
}

std::vector<std::pair<int, int>> sweep_ladder(const ExperimentConfig& config) {
  const size_t rungs = std::max(config.mesh_sizes.size(), config.step_counts.size());
  std::vector<std::pair<int, int>> out;
  out.reserve(rungs);
  for (size_t i = 0; i < rungs; ++i) {
    const int m = config.mesh_sizes[config.mesh_sizes.size() == 1 ? 0 : i];
    const int n = config.step_counts[config.step_counts.size() == 1 ? 0 : i];
    out.emplace_back(m, n);
  }
  return out;
}

}  // namespace hyperbreg::tools
