#include "hyperbreg/regularity.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hyperbreg {

namespace {

double binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= static_cast<double>(i);
  return out;
}

[[noreturn]] void missing_derivative(const char* where, const char* family, int needed,
                                     int declared) {
  std::ostringstream msg;
  msg << where << ": needs " << family << "^(" << needed << ") but declared order is "
      << declared;
  throw std::invalid_argument(msg.str());
}

void require_order(const char* where, const char* family, const OperatorFamily& fam,
                   int needed) {
  if (needed > fam.order()) missing_derivative(where, family, needed, fam.order());
}

void require_order(const char* where, const char* family, const RhsFunction& f, int needed) {
  if (needed > f.order()) missing_derivative(where, family, needed, f.order());
}

/// Seed polynomial P_j(t) = sum_{l=k-j}^{k-1} u_l t^{l-(k-j)}/(l-(k-j))! and
/// its t-derivatives: the v-independent part of the j-fold seeded
/// antiderivative composite, i.e. the truncated Taylor expansion of u^(k-j).
Eigen::VectorXd seed_polynomial(const std::vector<Eigen::VectorXd>& u, int k, int j, double t,
                                int derivative) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.front().size());
  for (int l = k - j; l <= k - 1; ++l) {
    const int power = l - (k - j) - derivative;
    if (power < 0) continue;
    out += u[static_cast<size_t>(l)] * (std::pow(t, power) / factorial(power));
  }
  return out;
}

}  // namespace

CompatibleIVs compatible_initial_values(const ProblemData& p, int k) {
  if (k < 0) throw std::invalid_argument("compatible_initial_values: k must be >= 0");
  const char* where = "compatible_initial_values";

  CompatibleIVs ivs{k, {}};
  ivs.u.reserve(static_cast<size_t>(k) + 2);
  ivs.u.push_back(p.u0);
  ivs.u.push_back(p.u1);
  if (k == 0) return ivs;

  require_order(where, "C", p.C, 1);
  const Eigen::MatrixXd c0 = p.C.eval(0.0, 0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c0);
  if (!lu.isInvertible()) {
    throw std::runtime_error("compatible_initial_values: C(0) not invertible on discrete space");
  }

  for (int kappa = 0; kappa <= k - 1; ++kappa) {
    require_order(where, "f", p.f, kappa);
    Eigen::VectorXd rhs = p.f.eval(0.0, kappa);
    rhs -= (static_cast<double>(kappa + 1) * p.C.eval(0.0, 1) + p.B.eval(0.0, 0)) *
           ivs.u[static_cast<size_t>(kappa + 1)];
    for (int j = 0; j <= kappa; ++j) {
      const double c_aq = binom(kappa, j);
      const double c_b = binom(kappa, j + 1);
      const double c_c = binom(kappa + 1, j + 2);
      const Eigen::VectorXd& target = ivs.u[static_cast<size_t>(kappa - j)];
      if (c_aq != 0.0) {
        require_order(where, "A", p.A, j);
        require_order(where, "Q", p.Q, j);
        rhs -= c_aq * ((p.A.eval(0.0, j) + p.Q.eval(0.0, j)) * target);
      }
      if (c_b != 0.0) {
        require_order(where, "B", p.B, j + 1);
        rhs -= c_b * (p.B.eval(0.0, j + 1) * target);
      }
      if (c_c != 0.0) {
        require_order(where, "C", p.C, j + 2);
        rhs -= c_c * (p.C.eval(0.0, j + 2) * target);
      }
    }
    ivs.u.push_back(lu.solve(rhs));
  }
  return ivs;
}

AuxiliaryForm build_auxiliary(const ProblemData& p, int k, const CompatibleIVs& ivs) {
  if (k < 0) throw std::invalid_argument("build_auxiliary: k must be >= 0");
  if (ivs.level < k) throw std::invalid_argument("build_auxiliary: ivs cover fewer levels than k");
  const char* where = "build_auxiliary";

  if (k == 0) {
    return AuxiliaryForm{p.space, 0,    p.A,  p.C, p.B, p.Q, {}, {},
                         p.f,     ivs.at(0), ivs.at(1), p.horizon};
  }

  const int m = p.space->dim();
  const double horizon = p.horizon;
  const double kd = static_cast<double>(k);

  require_order(where, "C", p.C, 1);
  const int beff_order = std::min(p.B.order(), p.C.order() - 1);
  OperatorFamily beff(
      m, beff_order, OperatorKind::HtoH, false, std::nullopt, horizon,
      [C = p.C, B = p.B, kd](double t, int j) -> Eigen::MatrixXd {
        return kd * C.eval(t, j + 1) + B.eval(t, j);
      });

  require_order(where, "B", p.B, 1);
  require_order(where, "C", p.C, 2);
  const int qeff_order = std::min({p.Q.order(), p.B.order() - 1, p.C.order() - 2});
  const double c_second = kd * (kd + 1.0) / 2.0;
  OperatorFamily qeff(
      m, qeff_order, OperatorKind::VtoH, false, std::nullopt, horizon,
      [Q = p.Q, B = p.B, C = p.C, kd, c_second](double t, int j) -> Eigen::MatrixXd {
        return Q.eval(t, j) + kd * B.eval(t, j + 1) + c_second * C.eval(t, j + 2);
      });

  std::vector<OperatorFamily> dops;
  std::vector<OperatorFamily> eops;
  int correction_order = p.f.order() - k;
  for (int j = 1; j <= k; ++j) {
    const double c_a = binom(k, j);
    require_order(where, "A", p.A, j);
    const int d_order = p.A.order() - j;
    dops.push_back(OperatorFamily(
        m, d_order, OperatorKind::VtoVdual, false, std::nullopt, horizon,
        [A = p.A, c_a, j](double t, int der) -> Eigen::MatrixXd {
          return c_a * A.eval(t, j + der);
        }));

    const double c_c = binom(k + 1, j + 2);
    const double c_b = binom(k, j + 1);
    const double c_q = binom(k, j);
    int e_order = p.Q.order() - j;
    require_order(where, "Q", p.Q, j);
    if (c_c != 0.0) {
      require_order(where, "C", p.C, j + 2);
      e_order = std::min(e_order, p.C.order() - (j + 2));
    }
    if (c_b != 0.0) {
      require_order(where, "B", p.B, j + 1);
      e_order = std::min(e_order, p.B.order() - (j + 1));
    }
    eops.push_back(OperatorFamily(
        m, e_order, OperatorKind::VtoH, false, std::nullopt, horizon,
        [C = p.C, B = p.B, Q = p.Q, c_c, c_b, c_q, j](double t, int der) -> Eigen::MatrixXd {
          Eigen::MatrixXd out = c_q * Q.eval(t, j + der);
          if (c_c != 0.0) out += c_c * C.eval(t, j + 2 + der);
          if (c_b != 0.0) out += c_b * B.eval(t, j + 1 + der);
          return out;
        }));
    correction_order = std::min({correction_order, d_order, e_order});
  }

  require_order(where, "f", p.f, k);
  const int rhs_order = std::max(0, correction_order);
  std::vector<Eigen::VectorXd> seeds(ivs.u.begin(), ivs.u.begin() + k + 1);
  RhsFunction rhs(
      m, rhs_order, horizon,
      [f = p.f, dops, eops, seeds, k](double t, int der) -> Eigen::VectorXd {
        Eigen::VectorXd out = f.eval(t, k + der);
        for (int j = 1; j <= k; ++j) {
          const OperatorFamily& d = dops[static_cast<size_t>(j - 1)];
          const OperatorFamily& e = eops[static_cast<size_t>(j - 1)];
          // General Leibniz rule on (D_j + E_j)(t) P_j(t).
          for (int i = 0; i <= der; ++i) {
            const Eigen::VectorXd poly = seed_polynomial(seeds, k, j, t, der - i);
            out -= binom(der, i) * ((d.eval(t, i) + e.eval(t, i)) * poly);
          }
        }
        return out;
      });

  return AuxiliaryForm{p.space,          k,          p.A,       p.C,
                       std::move(beff),  std::move(qeff), std::move(dops), std::move(eops),
                       std::move(rhs),   ivs.at(k),  ivs.at(k + 1), horizon};
}

DerivativeSolve solve_derivative(const ProblemData& p, int k, const TimeGrid& grid,
                                 double lin_tol) {
  CompatibleIVs ivs = compatible_initial_values(p, k);
  const AuxiliaryForm form = build_auxiliary(p, k, ivs);
  const BlockSystem sys = assemble_block_system(form);
  const Trajectory state = integrate(sys, grid, lin_tol);

  DerivativeSolve out{k, {}, std::move(ivs), {}};
  out.levels.push_back(Solution{sys.gamma_block(state, 0), sys.beta_block(state)});
  for (int kappa = k - 1; kappa >= 0; --kappa) {
    const Trajectory& upper = out.levels.back().u;
    Trajectory w = antiderivative(upper, out.ivs.at(kappa));
    out.levels.push_back(Solution{std::move(w), upper});
  }
  out.reports.reserve(out.levels.size());
  for (int kappa = k; kappa >= 0; --kappa) {
    out.reports.push_back(energy_report(out.level(kappa), p, out.ivs, kappa));
  }
  return out;
}

double inductive_residual(const AuxiliaryForm& form_km1, const Trajectory& v,
                          const Eigen::VectorXd& seed, const TimeGrid& grid) {
  if (!(v.grid() == grid)) {
    throw std::invalid_argument("inductive_residual: trajectory grid mismatch");
  }
  if (std::abs(grid.horizon - form_km1.horizon) > 1e-12 * std::max(1.0, form_km1.horizon)) {
    throw std::invalid_argument("inductive_residual: grid horizon differs from form horizon");
  }
  const SpaceDiscretization& space = *form_km1.space;
  const int m = space.dim();
  if (v.dim() != m || seed.size() != m) {
    throw std::invalid_argument("inductive_residual: dimension mismatch");
  }
  if (grid.steps < 2) throw std::invalid_argument("inductive_residual: needs N >= 2");

  const Trajectory w = antiderivative(v, seed);

  // (C w')' by finite-differencing the C-pairing trajectory; w' = v exactly.
  std::vector<Eigen::VectorXd> cv;
  cv.reserve(static_cast<size_t>(grid.node_count()));
  for (int n = 0; n <= grid.steps; ++n) {
    cv.push_back(form_km1.Cop.eval(grid.node(n), 0) * v.at(n));
  }
  const Trajectory dcv = fd_time_derivative(Trajectory(grid, std::move(cv)));

  std::vector<Trajectory> iterated;  // R_0^j w for j = 1..level
  for (int j = 1; j <= form_km1.level; ++j) {
    iterated.push_back(antiderivative(j == 1 ? w : iterated.back(),
                                      Eigen::VectorXd::Zero(m)));
  }

  double worst = 0.0;
  for (int n = 1; n < grid.steps; ++n) {
    const double t = grid.node(n);
    Eigen::VectorXd r = dcv.at(n);
    r += form_km1.Beff.eval(t, 0) * v.at(n);
    r += (form_km1.Aop.eval(t, 0) + form_km1.Qeff.eval(t, 0)) * w.at(n);
    for (int j = 1; j <= form_km1.level; ++j) {
      r += (form_km1.Dops[static_cast<size_t>(j - 1)].eval(t, 0) +
            form_km1.Eops[static_cast<size_t>(j - 1)].eval(t, 0)) *
           iterated[static_cast<size_t>(j - 1)].at(n);
    }
    r -= form_km1.rhs.eval(t, 0);
    worst = std::max(worst, space.dual_norm_v(r));
  }
  return worst;
}

namespace {

EnergyReport make_report(const Solution& sol, const SpaceDiscretization& space,
                         const CompatibleIVs& ivs, int k, double a0, double c0,
                         const std::function<Eigen::VectorXd(double)>& f_deriv) {
  EnergyReport report;
  for (int n = 0; n <= sol.u.grid().steps; ++n) {
    report.sup_v_energy = std::max(report.sup_v_energy, sol.u.at(n).dot(space.gram_v() * sol.u.at(n)));
    report.sup_h_energy_deriv =
        std::max(report.sup_h_energy_deriv, sol.du.at(n).dot(space.gram_h() * sol.du.at(n)));
  }

  double data = 0.0;
  for (int j = 0; j <= k; ++j) data += ivs.at(j).dot(space.gram_v() * ivs.at(j));
  data += ivs.at(k + 1).dot(space.gram_h() * ivs.at(k + 1));
  // L2(I;H) norm of the rhs derivative, trapezoid in time over the solution grid.
  const TimeGrid& grid = sol.u.grid();
  double f_sq = 0.0;
  for (int n = 0; n <= grid.steps; ++n) {
    const Eigen::VectorXd r = f_deriv(grid.node(n));
    const double q = std::pow(space.dual_norm_h(r), 2);
    f_sq += (n == 0 || n == grid.steps) ? 0.5 * q : q;
  }
  data += f_sq * grid.dt();
  report.data_norm = data;

  report.lambda_observed =
      data > 0.0 ? (a0 * report.sup_v_energy + c0 * report.sup_h_energy_deriv) / data : 0.0;
  return report;
}

double coercivity_or_estimate(const OperatorFamily& fam, const Eigen::MatrixXd& gram) {
  if (fam.coercivity()) return *fam.coercivity();
  return estimate_coercivity(fam, gram, 19);
}

}  // namespace

EnergyReport energy_report(const Solution& sol, const ProblemData& p, const CompatibleIVs& ivs,
                           int k) {
  if (ivs.level < k) throw std::invalid_argument("energy_report: ivs cover fewer levels than k");
  require_order("energy_report", "f", p.f, k);
  const double a0 = coercivity_or_estimate(p.A, p.space->gram_v());
  const double c0 = coercivity_or_estimate(p.C, p.space->gram_h());
  return make_report(sol, *p.space, ivs, k, a0, c0,
                     [f = p.f, k](double t) { return f.eval(t, k); });
}

EnergyReport energy_report(const Solution& sol, const AuxiliaryForm& form,
                           const CompatibleIVs& ivs, int k) {
  if (ivs.level < k) throw std::invalid_argument("energy_report: ivs cover fewer levels than k");
  const double a0 = coercivity_or_estimate(form.Aop, form.space->gram_v());
  const double c0 = coercivity_or_estimate(form.Cop, form.space->gram_h());
  return make_report(sol, *form.space, ivs, k, a0, c0,
                     [rhs = form.rhs](double t) { return rhs.eval(t, 0); });
}

}  // namespace hyperbreg
