#pragma once

#include "config.hpp"

#include "hyperbreg/waveq1d.hpp"

#include <string>

namespace hyperbreg::tools {

/// Builds the wave-equation fixture for a config: a manufactured case by
/// name, or an inline case from the expression keys.  Throws ConfigError for
/// unknown case names (the message lists the valid ones).
WaveCase case_from_config(const ExperimentConfig& config);

/// Runs the experiment and writes `report.csv` into out_dir.  The CSV uses
/// comma separators, dot decimals, LF line endings and scientific floats with
/// 12 significant digits, so identical configs produce byte-identical files.
/// Sweep rungs run concurrently (capped by the HYPERBREG_THREADS variable);
/// rows are assembled in input order.  Nothing is written until the whole run
/// has succeeded.  Throws ConfigError for validation problems (exit 2) and
/// std::runtime_error for solver failures (exit 1).
void run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Deterministic float formatting used in the reports (12 significant digits,
/// scientific).
std::string format_report_double(double value);

}  // namespace hyperbreg::tools
