#pragma once

#include "hyperbreg/gelfand.hpp"
#include "hyperbreg/time_calculus.hpp"

#include <memory>
#include <vector>

namespace hyperbreg {

/// The level-k problem
///   (C v')' + Beff v' + (A + Qeff) v + sum_j (D_j + E_j) R_0^j v = rhs,
///   v(0) = iv0, (C v')(0) = C(0) iv1,
/// with k integral operators.  k = 0 is the plain forward problem.
struct AuxiliaryForm {
  std::shared_ptr<const SpaceDiscretization> space;
  int level;
  OperatorFamily Aop;
  OperatorFamily Cop;
  OperatorFamily Beff;
  OperatorFamily Qeff;
  std::vector<OperatorFamily> Dops;
  std::vector<OperatorFamily> Eops;
  RhsFunction rhs;
  Eigen::VectorXd iv0;
  Eigen::VectorXd iv1;
  double horizon;

  /// Throws on structural inconsistencies (list lengths, horizons, dims).
  void check() const;
};

/// First-order block system for the state y = (beta, gamma^0, ..., gamma^k)
/// with beta = alpha', gamma^0 = alpha and gamma^l the l-fold antiderivative
/// of alpha with zero seeds:
///
///   lhs(t) y' = rhs_mat(t) y + forcing(t),
///   lhs = diag(M_C(t), I),  top row of rhs_mat = [-M_{-1} | -M_0 | ... | -M_k],
///   subdiagonal identity blocks wire gamma^0' = beta, gamma^l' = gamma^{l-1}.
class BlockSystem {
 public:
  BlockSystem(std::shared_ptr<const SpaceDiscretization> space, int level, double horizon,
              std::function<Eigen::MatrixXd(double)> mass_c,
              std::function<Eigen::MatrixXd(double)> damping,
              std::vector<std::function<Eigen::MatrixXd(double)>> stiffness,
              std::function<Eigen::VectorXd(double)> forcing, Eigen::VectorXd init);

  int level() const { return level_; }
  int block_dim() const { return space_->dim(); }
  int dimension() const { return (level_ + 2) * space_->dim(); }
  double horizon() const { return horizon_; }
  const SpaceDiscretization& space() const { return *space_; }
  const Eigen::VectorXd& init() const { return init_; }

  /// M_{-2}(t), the C-pairing block.
  Eigen::MatrixXd mass(double t) const { return mass_c_(t); }
  /// M_{-1}(t) = (C' + Beff)-pairings.
  Eigen::MatrixXd damping(double t) const { return damping_(t); }
  /// M_l(t) for l = 0..k (M_0 = A + Qeff pairings, M_l = D_l + E_l pairings).
  Eigen::MatrixXd stiffness(double t, int l) const { return stiffness_.at(static_cast<size_t>(l))(t); }
  Eigen::VectorXd forcing_block(double t) const { return forcing_(t); }

  /// Dense assembled views of the (k+2)m system, mostly for inspection/tests.
  Eigen::MatrixXd lhs(double t) const;
  Eigen::MatrixXd rhs_mat(double t) const;
  Eigen::VectorXd forcing(double t) const;

  /// Slices a full-state trajectory into its beta / gamma^l components.
  Trajectory beta_block(const Trajectory& state) const;
  Trajectory gamma_block(const Trajectory& state, int l) const;

 private:
  std::shared_ptr<const SpaceDiscretization> space_;
  int level_;
  double horizon_;
  std::function<Eigen::MatrixXd(double)> mass_c_;
  std::function<Eigen::MatrixXd(double)> damping_;
  std::vector<std::function<Eigen::MatrixXd(double)>> stiffness_;
  std::function<Eigen::VectorXd(double)> forcing_;
  Eigen::VectorXd init_;
};

/// Builds the block system of an auxiliary form.  The initial state solves
/// M_{-2}(0) beta(0) = gramH * iv1 (projected velocity initial value),
/// gamma^0(0) = iv0 and gamma^l(0) = 0 for l >= 1.
/// Throws if the C-pairing matrix at t = 0 is singular.
BlockSystem assemble_block_system(const AuxiliaryForm& form);

/// Implicit midpoint integration of the block system:
///   [lhs(t+dt/2)/dt - rhs(t+dt/2)/2] y_{n+1}
///     = [lhs(t+dt/2)/dt + rhs(t+dt/2)/2] y_n + forcing(t+dt/2).
/// Internally eliminates the identity blocks so only one m x m factorization
/// is needed per step; the per-step residual of the (dt-scaled) full relation
/// is verified against lin_tol and a failure reports the step index.
/// Returns the full-state trajectory at the grid nodes.
Trajectory integrate(const BlockSystem& sys, const TimeGrid& grid, double lin_tol);

struct Solution {
  Trajectory u;
  Trajectory du;
};

/// Forward solve of the k = 0 problem: wraps assemble_block_system over
/// (A, B, C, Q, f, u0, u1) and extracts u = gamma^0, du = beta.
Solution solve_forward(const ProblemData& p, const TimeGrid& grid, double lin_tol);

}  // namespace hyperbreg
