// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion.  Exit code = number of failures.

#include "hyperbreg/regularity.hpp"
#include "hyperbreg/waveq1d.hpp"

#include "support/fixtures.hpp"
#include "support/poly_oracle.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

using namespace hyperbreg;

namespace {

constexpr double kPi = std::numbers::pi;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

struct Ladder {
  int mesh;
  int steps;
};
const std::vector<Ladder> kLadder = {{33, 512}, {65, 1024}, {129, 2048}};

ProblemData assemble(const WaveCase& wave, int mesh_size) {
  return assemble_wave_problem(Mesh1D(mesh_size), wave.a, wave.f, wave.u0, wave.u1, 1.0);
}

std::vector<double> mms_errors(const std::string& case_name) {
  const WaveCase wave = manufactured_case(case_name);
  std::vector<double> errors;
  for (const auto& rung : kLadder) {
    const Mesh1D mesh(rung.mesh);
    const ProblemData p = assemble(wave, rung.mesh);
    const Solution sol = solve_forward(p, TimeGrid(1.0, rung.steps), 1e-10);
    errors.push_back(linf_h_error(sol.u, wave.exact, mesh, p.space->gram_h()));
  }
  return errors;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (size_t i = 1; i < errors.size(); ++i) {
    const double h_prev = 1.0 / static_cast<double>(kLadder[i - 1].mesh + 1);
    const double h_cur = 1.0 / static_cast<double>(kLadder[i].mesh + 1);
    orders.push_back(std::log(errors[i - 1] / errors[i]) / std::log(h_prev / h_cur));
  }
  return orders;
}

// 1. MMS forward convergence on static-sine.
std::string criterion_mms_static() {
  const auto errors = mms_errors("static-sine");
  const auto orders = observed_orders(errors);
  for (double order : orders) {
    require(order >= 1.9, "observed order " + fmt(order) + " < 1.9");
  }
  require(errors.back() <= 5e-4,
          "finest error " + fmt(errors.back()) + " > 5e-4");
  return "orders " + fmt(orders[0]) + ", " + fmt(orders[1]) + "; finest err " +
         fmt(errors.back());
}

// 2. Time-dependent-coefficient convergence on timedep-sine.
std::string criterion_mms_timedep() {
  const auto errors = mms_errors("timedep-sine");
  const auto orders = observed_orders(errors);
  for (double order : orders) {
    require(order >= 1.8, "observed order " + fmt(order) + " < 1.8");
  }
  return "orders " + fmt(orders[0]) + ", " + fmt(orders[1]);
}

// 3. Compatibility recursion vs the independent series oracle.
std::string criterion_compat_oracle() {
  double worst = 0.0;
  for (unsigned instance = 0; instance < 20; ++instance) {
    const testing::PolyProblem fixture = testing::random_poly_problem(500 + instance, 3, 3);
    for (int k = 1; k <= 3; ++k) {
      const CompatibleIVs ivs = compatible_initial_values(fixture.p, k);
      const auto oracle =
          testing::oracle_compatible_ivs(fixture.c, fixture.b, fixture.a, fixture.q,
                                         fixture.f, fixture.p.u0, fixture.p.u1, k);
      for (int j = 0; j <= k + 1; ++j) {
        const double gap = (ivs.at(j) - oracle[static_cast<size_t>(j)]).norm() /
                           std::max(1.0, oracle[static_cast<size_t>(j)].norm());
        worst = std::max(worst, gap);
        require(gap <= 1e-10, "instance " + std::to_string(instance) + ", k=" +
                                  std::to_string(k) + ", level " + std::to_string(j) +
                                  ": relative gap " + fmt(gap) + " > 1e-10");
      }
    }
  }
  return "20 instances, k <= 3, worst relative gap " + fmt(worst);
}

// 4. Theorem-level derivative consistency.
std::string criterion_derivative_consistency() {
  const WaveCase wave = manufactured_case("timedep-sine");
  std::vector<double> gaps;
  for (const auto& rung : kLadder) {
    const ProblemData p = assemble(wave, rung.mesh);
    const DerivativeSolve solved =
        solve_derivative(p, 1, TimeGrid(1.0, rung.steps), 1e-10);
    const Trajectory fd = fd_time_derivative(solved.level(0).u);
    const double gap =
        l2_time_norm(trajectory_difference(fd, solved.level(1).u), p.space->gram_h());
    const double scale = l2_time_norm(solved.level(1).u, p.space->gram_h());
    gaps.push_back(gap / scale);
  }
  for (size_t i = 1; i < gaps.size(); ++i) {
    require(gaps[i] < gaps[i - 1], "fd gap not decreasing across rungs");
  }
  require(gaps.back() <= 0.05, "finest fd gap " + fmt(gaps.back()) + " > 5%");

  const WaveCase poly = manufactured_case("poly-time");
  const Mesh1D mesh(129);
  const ProblemData p = assemble(poly, 129);
  const DerivativeSolve solved = solve_derivative(p, 2, TimeGrid(1.0, 512), 1e-10);
  const double err = linf_h_error(solved.level(2).u, poly.exact, mesh, p.space->gram_h(), 2);
  const double scale =
      p.space->norm_h(nodal_interpolant(mesh, [](double x) { return std::sin(kPi * x); }));
  require(err / scale <= 1e-3,
          "poly-time u'' relative error " + fmt(err / scale) + " > 1e-3");
  return "k=1 fd gaps " + fmt(gaps[0]) + " > " + fmt(gaps[1]) + " > " + fmt(gaps[2]) +
         "; k=2 u'' rel err " + fmt(err / scale);
}

// 5. Inductive identity under dt halving.
std::string criterion_inductive() {
  const WaveCase wave = manufactured_case("poly-time");
  const ProblemData p = assemble(wave, 33);
  std::ostringstream detail;
  for (int k : {1, 2}) {
    const CompatibleIVs ivs = compatible_initial_values(p, k);
    const AuxiliaryForm form_km1 = build_auxiliary(p, k - 1, ivs);
    std::vector<double> residuals;
    for (int steps : {128, 256, 512}) {
      const TimeGrid grid(1.0, steps);
      const DerivativeSolve solved = solve_derivative(p, k, grid, 1e-11);
      residuals.push_back(
          inductive_residual(form_km1, solved.level(k).u, ivs.at(k - 1), grid));
    }
    for (size_t i = 1; i < residuals.size(); ++i) {
      const double order = std::log2(residuals[i - 1] / residuals[i]);
      require(order >= 1.9, "k=" + std::to_string(k) + ": residual order " + fmt(order) +
                                " < 1.9");
    }
    detail << "k=" << k << " residuals " << fmt(residuals[0]) << " -> " << fmt(residuals[1])
           << " -> " << fmt(residuals[2]) << "; ";
  }
  return detail.str();
}

// 6. Energy estimate structure.
std::string criterion_energy() {
  std::ostringstream detail;
  for (const std::string case_name : {"static-sine", "timedep-sine"}) {
    const WaveCase wave = manufactured_case(case_name);
    for (int k : {0, 1}) {
      std::vector<double> lambdas;
      for (const auto& rung : kLadder) {
        const ProblemData p = assemble(wave, rung.mesh);
        const DerivativeSolve solved =
            solve_derivative(p, k, TimeGrid(1.0, rung.steps), 1e-10);
        lambdas.push_back(solved.report(k).lambda_observed);
      }
      const double lo = *std::min_element(lambdas.begin(), lambdas.end());
      const double hi = *std::max_element(lambdas.begin(), lambdas.end());
      require(lo > 0.0, case_name + " k=" + std::to_string(k) + ": lambda not positive");
      require(hi / lo <= 2.0, case_name + " k=" + std::to_string(k) + ": lambda ratio " +
                                  fmt(hi / lo) + " > 2");
      detail << case_name << " k=" << k << " ratio " << fmt(hi / lo) << "; ";
    }
  }

  // Conservative constant-coefficient case: discrete energy drift.
  const WaveCase wave = manufactured_case("static-sine");
  const ProblemData p = assemble(wave, 33);
  const TimeGrid grid(1.0, 1024);
  const Solution sol = solve_forward(p, grid, 1e-10);
  const Eigen::MatrixXd stiffness = p.A.eval(0.0, 0);
  auto energy = [&](int n) {
    return 0.5 * (sol.du.at(n).dot(p.space->gram_h() * sol.du.at(n)) +
                  sol.u.at(n).dot(stiffness * sol.u.at(n)));
  };
  const double initial = energy(0);
  double drift = 0.0;
  for (int n = 1; n <= grid.steps; ++n) drift = std::max(drift, std::abs(energy(n) - initial));
  require(drift <= 1e-10 * initial,
          "relative energy drift " + fmt(drift / initial) + " > 1e-10");
  detail << "drift " << fmt(drift / initial);
  return detail.str();
}

// 7. Garding-shift invariance.
std::string criterion_garding() {
  const WaveCase wave = manufactured_case("timedep-sine");
  const ProblemData p = assemble(wave, 9);
  const auto [a_shifted, q_shifted] = shift_garding(p.A, p.Q, 3.0, *p.space);
  ProblemData shifted = p;
  shifted.A = a_shifted;
  shifted.Q = q_shifted;

  auto forward_form = [](const ProblemData& data) {
    return AuxiliaryForm{data.space, 0,       data.A,  data.C,      data.B, data.Q, {}, {},
                         data.f,     data.u0, data.u1, data.horizon};
  };
  const BlockSystem sys = assemble_block_system(forward_form(p));
  const BlockSystem sys_shifted = assemble_block_system(forward_form(shifted));
  double block_gap = 0.0;
  for (double t : validation_times(1.0)) {
    block_gap = std::max(
        block_gap, (sys.stiffness(t, 0) - sys_shifted.stiffness(t, 0)).cwiseAbs().maxCoeff());
  }
  require(block_gap <= 1e-14, "M0 block gap " + fmt(block_gap) + " > 1e-14");

  const TimeGrid grid(1.0, 256);
  const Solution sol = solve_forward(p, grid, 1e-10);
  const Solution sol_shifted = solve_forward(shifted, grid, 1e-10);
  const double traj_gap =
      max_node_norm(trajectory_difference(sol.u, sol_shifted.u), p.space->gram_h());
  require(traj_gap <= 1e-12, "trajectory gap " + fmt(traj_gap) + " > 1e-12");
  return "block gap " + fmt(block_gap) + ", trajectory gap " + fmt(traj_gap);
}

// 8. Frechet derivative Taylor test.
std::string criterion_frechet() {
  const WaveCase wave = manufactured_case("timedep-sine");
  const Mesh1D mesh(129);
  const TimeGrid grid(1.0, 2048);
  const SpaceTimeFunction h{8, [](double t, int j, double x) {
                              return j == 0   ? std::sin(kPi * x) * (1.0 + t)
                                     : j == 1 ? std::sin(kPi * x)
                                              : 0.0;
                            }};
  const auto rows = taylor_test(mesh, wave.a, wave.f, wave.u0, wave.u1, h, grid, 1e-10,
                                {1e-1, 3e-2, 1e-2});
  std::ostringstream detail;
  detail << "slopes";
  for (size_t i = 1; i < rows.size(); ++i) {
    require(std::abs(rows[i].slope - 2.0) <= 0.1,
            "slope " + fmt(rows[i].slope) + " outside 2.0 +- 0.1");
    detail << " " << fmt(rows[i].slope);
  }

  const auto zero_rows =
      taylor_test(Mesh1D(33), wave.a, wave.f, wave.u0, wave.u1, SpaceTimeFunction::zero(),
                  TimeGrid(1.0, 256), 1e-10, {1e-1, 3e-2, 1e-2});
  for (const auto& row : zero_rows) {
    require(row.remainder == 0.0, "h = 0 remainder not exactly zero");
  }
  detail << "; h=0 remainders exactly 0";
  return detail.str();
}

// 9. CLI determinism and validation exit codes.
std::string criterion_cli() {
#ifndef HYPERBREG_CLI_BINARY
  throw CheckFailure("HYPERBREG_CLI_BINARY not defined at build time");
#else
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hyperbreg_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path config = dir / "convergence.cfg";
  {
    std::ofstream out(config);
    out << "case = static-sine\nmesh_sizes = 17, 33\nstep_counts = 128, 256\n";
  }
  auto run_cli = [&](const std::string& extra_env, const std::string& args) {
    const std::string cmd = extra_env + " \"" + HYPERBREG_CLI_BINARY + "\" " + args +
                            " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WEXITSTATUS(raw);
  };

  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  int code = run_cli("HYPERBREG_THREADS=2",
                     "convergence --config " + config.string() + " --out " + out_a.string());
  require(code == 0, "first convergence run exited " + std::to_string(code));
  code = run_cli("HYPERBREG_THREADS=1",
                 "convergence --config " + config.string() + " --out " + out_b.string());
  require(code == 0, "second convergence run exited " + std::to_string(code));

  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const std::string report_a = slurp(out_a / "report.csv");
  const std::string report_b = slurp(out_b / "report.csv");
  require(!report_a.empty(), "first report is empty");
  require(report_a == report_b, "reports differ between reruns");

  // Invalid config: empty mesh_sizes must exit 2 and write nothing.
  const fs::path bad_config = dir / "bad.cfg";
  {
    std::ofstream out(bad_config);
    out << "case = static-sine\nmesh_sizes =\nstep_counts = 64\n";
  }
  const fs::path out_bad = dir / "bad";
  code = run_cli("", "convergence --config " + bad_config.string() + " --out " +
                         out_bad.string());
  require(code == 2, "invalid config exited " + std::to_string(code) + ", expected 2");
  require(!fs::exists(out_bad / "report.csv"), "invalid config left a partial report");

  // Unknown case: also exit 2.
  const fs::path unknown_config = dir / "unknown.cfg";
  {
    std::ofstream out(unknown_config);
    out << "case = not-a-case\nmesh_sizes = 9\nstep_counts = 64\n";
  }
  code = run_cli("", "solve --config " + unknown_config.string() + " --out " +
                         (dir / "unknown").string());
  require(code == 2, "unknown case exited " + std::to_string(code) + ", expected 2");

  fs::remove_all(dir);
  return "byte-identical reruns; invalid configs exit 2 without reports";
#endif
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1. MMS forward convergence (static-sine)", criterion_mms_static},
      {"2. Time-dependent-coefficient convergence (timedep-sine)", criterion_mms_timedep},
      {"3. Compatibility oracle equivalence", criterion_compat_oracle},
      {"4. Derivative-of-solution consistency", criterion_derivative_consistency},
      {"5. Inductive identity under dt halving", criterion_inductive},
      {"6. Energy estimate structure", criterion_energy},
      {"7. Garding-shift invariance", criterion_garding},
      {"8. Frechet derivative Taylor test", criterion_frechet},
      {"9. CLI determinism and exit codes", criterion_cli},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      const std::string detail = criterion.run();
      std::cout << "[PASS] " << criterion.name << ": " << detail << "\n";
    } catch (const std::exception& err) {
      ++failures;
      std::cout << "[FAIL] " << criterion.name << ": " << err.what() << "\n";
    }
    std::cout.flush();
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << "\n";
  return failures;
}
