#pragma once

#include "hyperbreg/galerkin.hpp"
#include "hyperbreg/gelfand.hpp"
#include "hyperbreg/time_calculus.hpp"

#include <vector>

namespace hyperbreg {

/// Compatible initial values u_0, ..., u_{k+1} for a level-k solve.  The
/// vectors u_0..u_k are the V-regular data, u_{k+1} the H-datum.
struct CompatibleIVs {
  int level;
  std::vector<Eigen::VectorXd> u;  // size level + 2

  const Eigen::VectorXd& at(int j) const { return u.at(static_cast<size_t>(j)); }
};

/// Observed pieces of the energy estimate at one level: the left-hand side
/// energies, the data norm, and their ratio.
struct EnergyReport {
  double sup_v_energy = 0.0;        // max_n u^T gramV u
  double sup_h_energy_deriv = 0.0;  // max_n du^T gramH du
  double data_norm = 0.0;           // sum ||u_j||_V^2 + ||u_{k+1}||_H^2 + ||f^(k)||^2_{L2(I;H)}
  double lambda_observed = 0.0;     // (a0 supV + c0 supH') / data_norm, 0 for zero data
};

/// Solves the recursion
///   C(0) u_{kappa+2} = f^(kappa)(0) - ((kappa+1) C'(0) + B(0)) u_{kappa+1}
///     - sum_j [ binom(kappa,j)(A^(j) + Q^(j))(0) + binom(kappa,j+1) B^(j+1)(0)
///               + binom(kappa+1,j+2) C^(j+2)(0) ] u_{kappa-j}
/// for kappa = 0..k-1, starting from u_0, u_1.  Out-of-range binomial
/// coefficients vanish, so the corresponding derivatives are never evaluated.
/// Throws when a needed derivative exceeds a family's declared order, naming
/// the missing derivative.
CompatibleIVs compatible_initial_values(const ProblemData& p, int k);

/// Builds the level-k auxiliary form:
///   Beff = k C' + B, Qeff = Q + k B' + (k(k+1)/2) C'',
///   D_j = binom(k,j) A^(j),
///   E_j = binom(k+1,j+2) C^(j+2) + binom(k,j+1) B^(j+1) + binom(k,j) Q^(j),
///   rhs(t) = f^(k)(t) - sum_j (D_j + E_j)(t) P_j(t),
/// where P_j(t) = sum_{l=k-j}^{k-1} u_l t^{l-(k-j)}/(l-(k-j))! is the
/// v-independent part of the seeded antiderivative composite (the truncated
/// Taylor polynomial of u^(k-j)); iv0 = u_k, iv1 = u_{k+1}.
/// k = 0 returns the original problem unchanged.
AuxiliaryForm build_auxiliary(const ProblemData& p, int k, const CompatibleIVs& ivs);

/// Result of a level-k derivative solve: `levels[i]` is the solution at level
/// k - i (ordered k down to 0), with matching energy reports.
struct DerivativeSolve {
  int top_level;
  std::vector<Solution> levels;
  CompatibleIVs ivs;
  std::vector<EnergyReport> reports;

  const Solution& level(int kappa) const {
    return levels.at(static_cast<size_t>(top_level - kappa));
  }
  const EnergyReport& report(int kappa) const {
    return reports.at(static_cast<size_t>(top_level - kappa));
  }
};

/// Integrates the level-k auxiliary problem and reconstructs all lower levels
/// by repeated antiderivatives seeded with u_{kappa-1}.  The level-0
/// trajectory agrees with solve_forward up to O(dt^2).
DerivativeSolve solve_derivative(const ProblemData& p, int k, const TimeGrid& grid,
                                 double lin_tol);

/// Numerical check of the inductive identity: w = antiderivative(v, seed)
/// should satisfy the level-(k-1) equation.  Returns the maximum over
/// interior nodes of the discrete V*-norm of the equation residual, with the
/// outer (C w')' evaluated by finite-differencing the C-pairing trajectory.
double inductive_residual(const AuxiliaryForm& form_km1, const Trajectory& v,
                          const Eigen::VectorXd& seed, const TimeGrid& grid);

/// Energy report for a level-k solution against the original problem data
/// (f measured at derivative order k in the discrete L2(I;H) norm).
EnergyReport energy_report(const Solution& sol, const ProblemData& p,
                           const CompatibleIVs& ivs, int k);

/// Same, but measuring the auxiliary form's own right-hand side.
EnergyReport energy_report(const Solution& sol, const AuxiliaryForm& form,
                           const CompatibleIVs& ivs, int k);

}  // namespace hyperbreg
