#include "hyperbreg/galerkin.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hyperbreg {

void AuxiliaryForm::check() const {
  if (!space) throw std::invalid_argument("AuxiliaryForm: space must be set");
  if (level < 0) throw std::invalid_argument("AuxiliaryForm: level must be >= 0");
  if (Dops.size() != static_cast<size_t>(level) || Eops.size() != static_cast<size_t>(level)) {
    throw std::invalid_argument("AuxiliaryForm: need exactly k operators D_1..D_k, E_1..E_k");
  }
  const int m = space->dim();
  auto check_family = [&](const OperatorFamily& fam, const char* name) {
    if (fam.dim() != m) {
      throw std::invalid_argument(std::string("AuxiliaryForm: dimension mismatch in ") + name);
    }
    if (std::abs(fam.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
      throw std::invalid_argument(std::string("AuxiliaryForm: horizon mismatch in ") + name);
    }
  };
  check_family(Aop, "A");
  check_family(Cop, "C");
  check_family(Beff, "Beff");
  check_family(Qeff, "Qeff");
  for (const auto& d : Dops) check_family(d, "D");
  for (const auto& e : Eops) check_family(e, "E");
  if (rhs.dim() != m) throw std::invalid_argument("AuxiliaryForm: rhs dimension mismatch");
  if (iv0.size() != m || iv1.size() != m) {
    throw std::invalid_argument("AuxiliaryForm: initial value dimension mismatch");
  }
}

BlockSystem::BlockSystem(std::shared_ptr<const SpaceDiscretization> space, int level,
                         double horizon, std::function<Eigen::MatrixXd(double)> mass_c,
                         std::function<Eigen::MatrixXd(double)> damping,
                         std::vector<std::function<Eigen::MatrixXd(double)>> stiffness,
                         std::function<Eigen::VectorXd(double)> forcing, Eigen::VectorXd init)
    : space_(std::move(space)),
      level_(level),
      horizon_(horizon),
      mass_c_(std::move(mass_c)),
      damping_(std::move(damping)),
      stiffness_(std::move(stiffness)),
      forcing_(std::move(forcing)),
      init_(std::move(init)) {
  if (stiffness_.size() != static_cast<size_t>(level_ + 1)) {
    throw std::invalid_argument("BlockSystem: need stiffness blocks M_0..M_k");
  }
  if (init_.size() != dimension()) {
    throw std::invalid_argument("BlockSystem: init has wrong dimension");
  }
}

Eigen::MatrixXd BlockSystem::lhs(double t) const {
  const int m = block_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(dimension(), dimension());
  out.topLeftCorner(m, m) = mass_c_(t);
  return out;
}

Eigen::MatrixXd BlockSystem::rhs_mat(double t) const {
  const int m = block_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dimension(), dimension());
  out.block(0, 0, m, m) = -damping_(t);
  for (int l = 0; l <= level_; ++l) {
    out.block(0, (l + 1) * m, m, m) = -stiffness_.at(static_cast<size_t>(l))(t);
  }
  // gamma^0' = beta; gamma^l' = gamma^{l-1}.
  for (int l = 0; l <= level_; ++l) {
    out.block((l + 1) * m, l * m, m, m) = Eigen::MatrixXd::Identity(m, m);
  }
  return out;
}

Eigen::VectorXd BlockSystem::forcing(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
  out.head(block_dim()) = forcing_(t);
  return out;
}

Trajectory BlockSystem::beta_block(const Trajectory& state) const {
  return gamma_block(state, -1);
}

Trajectory BlockSystem::gamma_block(const Trajectory& state, int l) const {
  if (l < -1 || l > level_) throw std::invalid_argument("BlockSystem: block index out of range");
  if (state.dim() != dimension()) {
    throw std::invalid_argument("BlockSystem: state has wrong dimension");
  }
  const int m = block_dim();
  const int offset = (l + 1) * m;
  std::vector<Eigen::VectorXd> vals;
  vals.reserve(static_cast<size_t>(state.grid().node_count()));
  for (int n = 0; n <= state.grid().steps; ++n) {
    vals.push_back(state.at(n).segment(offset, m));
  }
  return Trajectory(state.grid(), std::move(vals));
}

BlockSystem assemble_block_system(const AuxiliaryForm& form) {
  form.check();
  const auto space = form.space;
  const int m = space->dim();
  const int k = form.level;

  auto mass_c = [cop = form.Cop](double t) { return cop.eval(t, 0); };
  auto damping = [cop = form.Cop, beff = form.Beff](double t) {
    return Eigen::MatrixXd(cop.eval(t, 1) + beff.eval(t, 0));
  };
  std::vector<std::function<Eigen::MatrixXd(double)>> stiffness;
  stiffness.push_back([aop = form.Aop, qeff = form.Qeff](double t) {
    return Eigen::MatrixXd(aop.eval(t, 0) + qeff.eval(t, 0));
  });
  for (int l = 1; l <= k; ++l) {
    stiffness.push_back(
        [d = form.Dops[static_cast<size_t>(l - 1)], e = form.Eops[static_cast<size_t>(l - 1)]](
            double t) { return Eigen::MatrixXd(d.eval(t, 0) + e.eval(t, 0)); });
  }
  auto forcing = [rhs = form.rhs](double t) { return rhs.eval(t, 0); };

  // beta(0) solves M_{-2}(0) beta(0) = gramH * iv1, matching the projected
  // initial condition (C(0) v'(0), phi_i) = (u_{k+1}, phi_i).
  const Eigen::MatrixXd c0 = mass_c(0.0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c0);
  if (!lu.isInvertible()) {
    throw std::runtime_error("assemble_block_system: C(0) not invertible on discrete space");
  }
  Eigen::VectorXd init = Eigen::VectorXd::Zero((k + 2) * m);
  init.head(m) = lu.solve(space->gram_h() * form.iv1);
  init.segment(m, m) = form.iv0;

  return BlockSystem(space, k, form.horizon, mass_c, damping, std::move(stiffness), forcing,
                     std::move(init));
}

Trajectory integrate(const BlockSystem& sys, const TimeGrid& grid, double lin_tol) {
  if (std::abs(grid.horizon - sys.horizon()) > 1e-12 * std::max(1.0, sys.horizon())) {
    throw std::invalid_argument("integrate: grid horizon differs from system horizon");
  }
  if (!(lin_tol > 0.0)) throw std::invalid_argument("integrate: lin_tol must be > 0");

  const int m = sys.block_dim();
  const int k = sys.level();
  const double dt = grid.dt();
  const double half = 0.5 * dt;

  std::vector<Eigen::VectorXd> states;
  states.reserve(static_cast<size_t>(grid.node_count()));
  states.push_back(sys.init());

  std::vector<Eigen::MatrixXd> stiff(static_cast<size_t>(k + 1));
  std::vector<Eigen::VectorXd> gamma_pred(static_cast<size_t>(k + 1));

  for (int n = 0; n < grid.steps; ++n) {
    const double tm = (static_cast<double>(n) + 0.5) * dt;
    const Eigen::MatrixXd mass = sys.mass(tm);
    const Eigen::MatrixXd damp = sys.damping(tm);
    for (int l = 0; l <= k; ++l) stiff[static_cast<size_t>(l)] = sys.stiffness(tm, l);
    const Eigen::VectorXd force = sys.forcing_block(tm);

    const Eigen::VectorXd& y = states.back();
    const auto beta = y.head(m);

    // Eliminate the identity rows: gamma^l_{n+1} = d_l + (dt/2)^{l+1} beta_{n+1}
    // with d_0 = gamma^0 + (dt/2) beta, d_l = gamma^l + (dt/2) gamma^{l-1}
    //                                        + (dt/2) d_{l-1}.
    for (int l = 0; l <= k; ++l) {
      const auto gamma_l = y.segment((l + 1) * m, m);
      if (l == 0) {
        gamma_pred[0] = gamma_l + half * beta;
      } else {
        const auto gamma_prev = y.segment(l * m, m);
        gamma_pred[static_cast<size_t>(l)] =
            gamma_l + half * gamma_prev + half * gamma_pred[static_cast<size_t>(l - 1)];
      }
    }

    Eigen::MatrixXd lhs_eff = mass / dt + 0.5 * damp;
    double cascade = half;
    for (int l = 0; l <= k; ++l) {
      lhs_eff += 0.5 * cascade * stiff[static_cast<size_t>(l)];
      cascade *= half;
    }
    Eigen::VectorXd rhs_eff = force + mass * (beta / dt) - 0.5 * (damp * beta);
    for (int l = 0; l <= k; ++l) {
      rhs_eff -= 0.5 * (stiff[static_cast<size_t>(l)] *
                        (gamma_pred[static_cast<size_t>(l)] + y.segment((l + 1) * m, m)));
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs_eff);
    const Eigen::VectorXd beta_next = lu.solve(rhs_eff);

    Eigen::VectorXd y_next(sys.dimension());
    y_next.head(m) = beta_next;
    double power = half;
    for (int l = 0; l <= k; ++l) {
      y_next.segment((l + 1) * m, m) = gamma_pred[static_cast<size_t>(l)] + power * beta_next;
      power *= half;
    }

    // Residual of the dt-scaled midpoint relation
    //   [lhs - (dt/2) rhs] y_{n+1} - [lhs + (dt/2) rhs] y_n - dt forcing.
    Eigen::VectorXd res_top = mass * (beta_next - beta) + half * (damp * (beta_next + beta));
    for (int l = 0; l <= k; ++l) {
      res_top += half * (stiff[static_cast<size_t>(l)] *
                         (y_next.segment((l + 1) * m, m) + y.segment((l + 1) * m, m)));
    }
    res_top -= dt * force;
    double res_sq = res_top.squaredNorm();
    {
      // gamma^0 row: (gamma^0+ - gamma^0) - (dt/2)(beta+ + beta)
      Eigen::VectorXd r0 = (y_next.segment(m, m) - y.segment(m, m)) - half * (beta_next + beta);
      res_sq += r0.squaredNorm();
      for (int l = 1; l <= k; ++l) {
        Eigen::VectorXd rl = (y_next.segment((l + 1) * m, m) - y.segment((l + 1) * m, m)) -
                             half * (y_next.segment(l * m, m) + y.segment(l * m, m));
        res_sq += rl.squaredNorm();
      }
    }
    const double scale = 1.0 + dt * force.norm() + y.norm() + y_next.norm();
    if (!std::isfinite(res_sq) || std::sqrt(res_sq) > lin_tol * scale) {
      std::ostringstream msg;
      msg << "integrate: linear solve residual " << std::sqrt(res_sq) << " exceeds tolerance "
          << lin_tol * scale << " at step " << n;
      throw std::runtime_error(msg.str());
    }

    states.push_back(std::move(y_next));
  }

  return Trajectory(grid, std::move(states));
}

Solution solve_forward(const ProblemData& p, const TimeGrid& grid, double lin_tol) {
  AuxiliaryForm form{p.space, 0,   p.A, p.C, p.B, p.Q, {}, {},
                     p.f,     p.u0, p.u1, p.horizon};
  const BlockSystem sys = assemble_block_system(form);
  const Trajectory state = integrate(sys, grid, lin_tol);
  return Solution{sys.gamma_block(state, 0), sys.beta_block(state)};
}

}  // namespace hyperbreg
