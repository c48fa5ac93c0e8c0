#include "runner.hpp"

#include "expr.hpp"

#include "hyperbreg/regularity.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

namespace hyperbreg::tools {

namespace {

constexpr int kInlineOrder = 6;

std::vector<Expr> derivative_chain(const std::string& text, int order) {
  std::vector<Expr> chain;
  chain.push_back(Expr::parse(text));
  for (int j = 0; j < order; ++j) chain.push_back(chain.back().derivative_t());
  return chain;
}

SpaceTimeFunction spacetime_from_expr(const std::string& text, int order) {
  auto chain = std::make_shared<std::vector<Expr>>(derivative_chain(text, order));
  return SpaceTimeFunction{order, [chain](double t, int j, double x) {
                             return (*chain)[static_cast<size_t>(j)].eval(t, x);
                           }};
}

size_t thread_cap() {
  size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HYPERBREG_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0) cap = static_cast<size_t>(parsed);
  }
  return cap;
}

template <typename Fn>
void parallel_for(size_t count, Fn&& fn) {
  const size_t workers = std::min(thread_cap(), count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string fmt_int(long value) { return std::to_string(value); }

void require_manufactured(const ExperimentConfig& config, const char* why) {
  if (config.case_name == "inline") {
    throw ConfigError(std::string("config: ") + why + " requires a manufactured case");
  }
}

ProblemData assemble_validated(const Mesh1D& mesh, const WaveCase& wave, double horizon) {
  ProblemData p = assemble_wave_problem(mesh, wave.a, wave.f, wave.u0, wave.u1, horizon);
  const ValidationReport report = validate_problem(p);
  if (!report.ok()) {
    std::ostringstream msg;
    msg << "problem validation failed:";
    for (const auto& v : report.violations) msg << "\n  " << v;
    throw ConfigError(msg.str());
  }
  return p;
}

struct Csv {
  std::string body;

  void header(const std::string& columns) { body += columns + "\n"; }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) body += ',';
      body += cells[i];
    }
    body += '\n';
  }
};

Csv run_solve(const ExperimentConfig& config, const WaveCase& wave) {
  const Mesh1D mesh(config.mesh_sizes.front());
  const TimeGrid grid(config.horizon, config.step_counts.front());
  const ProblemData p = assemble_validated(mesh, wave, config.horizon);
  const Solution sol = solve_forward(p, grid, config.lin_tol);

  Csv csv;
  csv.header("t,norm_V_u,norm_H_du");
  for (int n = 0; n <= grid.steps; ++n) {
    csv.row({format_report_double(grid.node(n)),
             format_report_double(p.space->norm_v(sol.u.at(n))),
             format_report_double(p.space->norm_h(sol.du.at(n)))});
  }
  return csv;
}

Csv run_compat(const ExperimentConfig& config, const WaveCase& wave) {
  const Mesh1D mesh(config.mesh_sizes.front());
  const ProblemData p = assemble_validated(mesh, wave, config.horizon);
  const CompatibleIVs ivs = compatible_initial_values(p, config.level);

  Csv csv;
  csv.header("level,norm_V");
  for (int level = 0; level <= config.level + 1; ++level) {
    csv.row({fmt_int(level), format_report_double(p.space->norm_v(ivs.at(level)))});
  }
  return csv;
}

Csv run_derivatives(const ExperimentConfig& config, const WaveCase& wave) {
  const Mesh1D mesh(config.mesh_sizes.front());
  const TimeGrid grid(config.horizon, config.step_counts.front());
  const ProblemData p = assemble_validated(mesh, wave, config.horizon);
  const DerivativeSolve solved = solve_derivative(p, config.level, grid, config.lin_tol);

  Csv csv;
  csv.header("level,sup_V_energy,sup_H_energy_deriv,lambda_observed,fd_gap_rel");
  for (int kappa = 0; kappa <= config.level; ++kappa) {
    double fd_gap = std::numeric_limits<double>::quiet_NaN();
    if (kappa < config.level) {
      const Trajectory fd = fd_time_derivative(solved.level(kappa).u);
      const Trajectory& upper = solved.level(kappa + 1).u;
      const double dist = l2_time_norm(trajectory_difference(fd, upper), p.space->gram_h());
      const double scale = l2_time_norm(upper, p.space->gram_h());
      fd_gap = scale > 0.0 ? dist / scale : dist;
    }
    const EnergyReport& report = solved.report(kappa);
    csv.row({fmt_int(kappa), format_report_double(report.sup_v_energy),
             format_report_double(report.sup_h_energy_deriv),
             format_report_double(report.lambda_observed), format_report_double(fd_gap)});
  }
  return csv;
}

Csv run_frechet(const ExperimentConfig& config, const WaveCase& wave) {
  const Mesh1D mesh(config.mesh_sizes.front());
  const TimeGrid grid(config.horizon, config.step_counts.front());
  const SpaceTimeFunction h_pert = spacetime_from_expr(config.h_pert, kInlineOrder);
  const auto rows = taylor_test(mesh, wave.a, wave.f, wave.u0, wave.u1, h_pert, grid,
                                config.lin_tol, config.eps_list);

  Csv csv;
  csv.header("eps,remainder,slope");
  for (const auto& row : rows) {
    csv.row({format_report_double(row.eps), format_report_double(row.remainder),
             format_report_double(row.slope)});
  }
  return csv;
}

Csv run_convergence(const ExperimentConfig& config, const WaveCase& wave) {
  require_manufactured(config, "convergence");
  const auto ladder = sweep_ladder(config);
  std::vector<double> errors(ladder.size());
  parallel_for(ladder.size(), [&](size_t i) {
    const Mesh1D mesh(ladder[i].first);
    const TimeGrid grid(config.horizon, ladder[i].second);
    const ProblemData p = assemble_validated(mesh, wave, config.horizon);
    const Solution sol = solve_forward(p, grid, config.lin_tol);
    errors[i] = linf_h_error(sol.u, wave.exact, mesh, p.space->gram_h());
  });

  Csv csv;
  csv.header("m,N,err_LinfH,observed_order");
  for (size_t i = 0; i < ladder.size(); ++i) {
    double order = std::numeric_limits<double>::quiet_NaN();
    if (i > 0 && errors[i - 1] > 0.0 && errors[i] > 0.0) {
      const double h_prev = 1.0 / static_cast<double>(ladder[i - 1].first + 1);
      const double h_cur = 1.0 / static_cast<double>(ladder[i].first + 1);
      order = std::log(errors[i - 1] / errors[i]) / std::log(h_prev / h_cur);
    }
    csv.row({fmt_int(ladder[i].first), fmt_int(ladder[i].second),
             format_report_double(errors[i]), format_report_double(order)});
  }
  return csv;
}

Csv run_energy(const ExperimentConfig& config, const WaveCase& wave) {
  const auto ladder = sweep_ladder(config);
  std::vector<std::vector<EnergyReport>> reports(ladder.size());
  parallel_for(ladder.size(), [&](size_t i) {
    const Mesh1D mesh(ladder[i].first);
    const TimeGrid grid(config.horizon, ladder[i].second);
    const ProblemData p = assemble_validated(mesh, wave, config.horizon);
    const DerivativeSolve solved = solve_derivative(p, config.level, grid, config.lin_tol);
    std::vector<EnergyReport> per_level;
    per_level.reserve(static_cast<size_t>(config.level) + 1);
    for (int kappa = 0; kappa <= config.level; ++kappa) {
      per_level.push_back(solved.report(kappa));
    }
    reports[i] = std::move(per_level);
  });

  Csv csv;
  csv.header("m,N,level,sup_V_energy,sup_H_energy_deriv,data_norm,lambda_observed");
  for (size_t i = 0; i < ladder.size(); ++i) {
    for (int kappa = 0; kappa <= config.level; ++kappa) {
      const EnergyReport& r = reports[i][static_cast<size_t>(kappa)];
      csv.row({fmt_int(ladder[i].first), fmt_int(ladder[i].second), fmt_int(kappa),
               format_report_double(r.sup_v_energy), format_report_double(r.sup_h_energy_deriv),
               format_report_double(r.data_norm), format_report_double(r.lambda_observed)});
    }
  }
  return csv;
}

}  // namespace

std::string format_report_double(double value) {
  std::array<char, 64> buf;
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                    std::chars_format::scientific, 11);
  return std::string(buf.data(), result.ptr);
}

WaveCase case_from_config(const ExperimentConfig& config) {
  if (config.case_name == "inline") {
    WaveCase wave;
    wave.name = "inline";
    auto a_fn = spacetime_from_expr(config.a_expr, kInlineOrder);
    wave.a = CoefficientField{a_fn.order, a_fn.evaluator, config.a_min};
    wave.f = spacetime_from_expr(config.f_expr, kInlineOrder);
    const Expr u0 = Expr::parse(config.u0_expr);
    const Expr u1 = Expr::parse(config.u1_expr);
    wave.u0 = [u0](double x) { return u0.eval(0.0, x); };
    wave.u1 = [u1](double x) { return u1.eval(0.0, x); };
    wave.exact = SpaceTimeFunction{0, [](double, int, double) -> double {
                                     throw std::runtime_error(
                                         "inline cases carry no exact solution");
                                   }};
    return wave;
  }
  try {
    return manufactured_case(config.case_name);
  } catch (const std::invalid_argument&) {
    std::ostringstream msg;
    msg << "config: unknown case '" << config.case_name << "'; valid cases: inline";
    for (const auto& name : manufactured_case_names()) msg << " " << name;
    throw ConfigError(msg.str());
  }
}

void run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  validate_config(config);
  const WaveCase wave = case_from_config(config);

  Csv csv;
  switch (config.command) {
    case Command::Solve: csv = run_solve(config, wave); break;
    case Command::Compat: csv = run_compat(config, wave); break;
    case Command::Derivatives: csv = run_derivatives(config, wave); break;
    case Command::FrechetTest: csv = run_frechet(config, wave); break;
    case Command::Convergence: csv = run_convergence(config, wave); break;
    case Command::Energy: csv = run_energy(config, wave); break;
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = std::filesystem::path(out_dir) / "report.csv";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << csv.body;
}

}  // namespace hyperbreg::tools
