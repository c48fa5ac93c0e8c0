#include "hyperbreg/waveq1d.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hyperbreg {

namespace {

constexpr double kPi = std::numbers::pi;
const double kGaussOffset = 0.5 / std::sqrt(3.0);

/// d^j/dt^j cos(w t) = w^j cos(w t + j pi/2).
double cos_derivative(double w, double t, int j) {
  return std::pow(w, j) * std::cos(w * t + 0.5 * kPi * static_cast<double>(j));
}

/// d^j/dt^j sin(w t) = w^j sin(w t + j pi/2).
double sin_derivative(double w, double t, int j) {
  return std::pow(w, j) * std::sin(w * t + 0.5 * kPi * static_cast<double>(j));
}

}  // namespace

Mesh1D::Mesh1D(int n_interior_) : n_interior(n_interior_) {
  if (n_interior < 1) throw std::invalid_argument("Mesh1D: need at least one interior node");
  h = 1.0 / static_cast<double>(n_interior + 1);
}

double SpaceTimeFunction::eval(double t, int j, double x) const {
  if (j < 0 || j > order) {
    throw std::out_of_range("SpaceTimeFunction: derivative order outside declared range");
  }
  return evaluator(t, j, x);
}

SpaceTimeFunction SpaceTimeFunction::zero(int order) {
  return SpaceTimeFunction{order, [](double, int, double) { return 0.0; }};
}

double CoefficientField::eval(double t, int j, double x) const {
  if (j < 0 || j > order) {
    throw std::out_of_range("CoefficientField: derivative order outside declared range");
  }
  return evaluator(t, j, x);
}

namespace {

Eigen::MatrixXd p1_mass_matrix(const Mesh1D& mesh) {
  const int m = mesh.dim();
  const double h = mesh.h;
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    mass(i, i) = 4.0 * h / 6.0;
    if (i + 1 < m) {
      mass(i, i + 1) = h / 6.0;
      mass(i + 1, i) = h / 6.0;
    }
  }
  return mass;
}

/// Stiffness with coefficient w(x) = weight(t, x), 2-point Gauss per element.
Eigen::MatrixXd weighted_stiffness(const Mesh1D& mesh,
                                   const std::function<double(double)>& weight) {
  const int m = mesh.dim();
  const double h = mesh.h;
  const double inv_h2 = 1.0 / (h * h);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (int e = 0; e <= m; ++e) {
    const double xl = static_cast<double>(e) * h;
    const double xc = xl + 0.5 * h;
    const double g1 = xc - kGaussOffset * h;
    const double g2 = xc + kGaussOffset * h;
    const double cell = 0.5 * h * (weight(g1) + weight(g2));  // int_e w dx
    const int left = e - 1;
    const int right = e;
    const double entry = cell * inv_h2;
    if (left >= 0) out(left, left) += entry;
    if (right < m) out(right, right) += entry;
    if (left >= 0 && right < m) {
      out(left, right) -= entry;
      out(right, left) -= entry;
    }
  }
  return out;
}

/// Load vector <g, phi_i> with 2-point Gauss per element.
Eigen::VectorXd p1_load(const Mesh1D& mesh, const std::function<double(double)>& g) {
  const int m = mesh.dim();
  const double h = mesh.h;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (int e = 0; e <= m; ++e) {
    const double xl = static_cast<double>(e) * h;
    const double xr = xl + h;
    const double xc = xl + 0.5 * h;
    const double g1 = xc - kGaussOffset * h;
    const double g2 = xc + kGaussOffset * h;
    const double w = 0.5 * h;
    const int left = e - 1;
    const int right = e;
    if (left >= 0) {
      out(left) += w * (g(g1) * (xr - g1) / h + g(g2) * (xr - g2) / h);
    }
    if (right < m) {
      out(right) += w * (g(g1) * (g1 - xl) / h + g(g2) * (g2 - xl) / h);
    }
  }
  return out;
}

}  // namespace

ProblemData assemble_wave_problem(const Mesh1D& mesh, const CoefficientField& a,
                                  const SpaceTimeFunction& f,
                                  const std::function<double(double)>& u0,
                                  const std::function<double(double)>& u1, double horizon) {
  const int m = mesh.dim();
  const Eigen::MatrixXd mass = p1_mass_matrix(mesh);
  const Eigen::MatrixXd unit_stiffness =
      weighted_stiffness(mesh, [](double) { return 1.0; });

  auto space = std::make_shared<SpaceDiscretization>(mass, unit_stiffness + mass);

  auto a_eval = [mesh, a](double t, int j) -> Eigen::MatrixXd {
    return weighted_stiffness(mesh, [&](double x) {
      const double value = a.eval(t, j, x);
      if (j == 0 && value < a.lower_bound) {
        std::ostringstream msg;
        msg << "assemble_wave_problem: coefficient " << value << " below lower bound "
            << a.lower_bound << " at t=" << t << ", x=" << x;
        throw std::runtime_error(msg.str());
      }
      return value;
    });
  };
  OperatorFamily a_unbounded(m, a.order, OperatorKind::VtoVdual, true, std::nullopt, horizon,
                             a_eval);
  const double a0 = estimate_coercivity(a_unbounded, space->gram_v(), 19);
  OperatorFamily a_family(m, a.order, OperatorKind::VtoVdual, true, a0, horizon, a_eval);

  OperatorFamily c_family(m, 6, OperatorKind::HtoH, true, 1.0, horizon,
                          [mass, m](double, int j) -> Eigen::MatrixXd {
                            if (j == 0) return mass;
                            return Eigen::MatrixXd::Zero(m, m);
                          });

  RhsFunction rhs(m, f.order, horizon, [mesh, f](double t, int j) -> Eigen::VectorXd {
    return p1_load(mesh, [&](double x) { return f.eval(t, j, x); });
  });

  return ProblemData{space,
                     std::move(a_family),
                     OperatorFamily::zero(m, OperatorKind::HtoH, horizon),
                     std::move(c_family),
                     OperatorFamily::zero(m, OperatorKind::VtoH, horizon),
                     std::move(rhs),
                     nodal_interpolant(mesh, u0),
                     nodal_interpolant(mesh, u1),
                     horizon};
}

WaveCase manufactured_case(const std::string& name) {
  const int order = 8;
  if (name == "static-sine") {
    // u = sin(pi x) cos(pi t), a = 1, f = 0.
    return WaveCase{
        name,
        CoefficientField{order, [](double, int j, double) { return j == 0 ? 1.0 : 0.0; }, 0.9},
        SpaceTimeFunction::zero(order),
        [](double x) { return std::sin(kPi * x); },
        [](double) { return 0.0; },
        SpaceTimeFunction{order, [](double t, int j, double x) {
                            return std::sin(kPi * x) * cos_derivative(kPi, t, j);
                          }}};
  }
  if (name == "timedep-sine") {
    // u = sin(pi x) cos t, a = 1 + sin(t)/2,
    // f = u'' - (a u_x)_x = sin(pi x) [(pi^2 - 1) cos t + (pi^2/4) sin 2t].
    return WaveCase{
        name,
        CoefficientField{order,
                         [](double t, int j, double) {
                           return j == 0 ? 1.0 + 0.5 * std::sin(t)
                                         : 0.5 * sin_derivative(1.0, t, j);
                         },
                         0.5},
        SpaceTimeFunction{order,
                          [](double t, int j, double x) {
                            const double g = (kPi * kPi - 1.0) * cos_derivative(1.0, t, j) +
                                             0.25 * kPi * kPi * sin_derivative(2.0, t, j);
                            return std::sin(kPi * x) * g;
                          }},
        [](double x) { return std::sin(kPi * x); },
        [](double) { return 0.0; },
        SpaceTimeFunction{order, [](double t, int j, double x) {
                            return std::sin(kPi * x) * cos_derivative(1.0, t, j);
                          }}};
  }
  if (name == "poly-time") {
    // u = sin(pi x) (1 + t + t^2/2), a = 1, f = sin(pi x)(1 + pi^2 (1 + t + t^2/2)).
    auto poly = [](double t, int j) -> double {
      switch (j) {
        case 0: return 1.0 + t + 0.5 * t * t;
        case 1: return 1.0 + t;
        case 2: return 1.0;
        default: return 0.0;
      }
    };
    return WaveCase{
        name,
        CoefficientField{order, [](double, int j, double) { return j == 0 ? 1.0 : 0.0; }, 0.9},
        SpaceTimeFunction{order,
                          [poly](double t, int j, double x) {
                            const double from_u_tt = j == 0 ? 1.0 : 0.0;
                            return std::sin(kPi * x) * (from_u_tt + kPi * kPi * poly(t, j));
                          }},
        [poly](double x) { return std::sin(kPi * x) * poly(0.0, 0); },
        [poly](double x) { return std::sin(kPi * x) * poly(0.0, 1); },
        SpaceTimeFunction{order, [poly](double t, int j, double x) {
                            return std::sin(kPi * x) * poly(t, j);
                          }}};
  }
  std::ostringstream msg;
  msg << "manufactured_case: unknown case '" << name << "'; valid cases:";
  for (const auto& valid : manufactured_case_names()) msg << " " << valid;
  throw std::invalid_argument(msg.str());
}

std::vector<std::string> manufactured_case_names() {
  return {"static-sine", "timedep-sine", "poly-time"};
}

Eigen::VectorXd nodal_interpolant(const Mesh1D& mesh, const std::function<double(double)>& fn) {
  Eigen::VectorXd out(mesh.dim());
  for (int i = 0; i < mesh.dim(); ++i) out(i) = fn(mesh.node(i));
  return out;
}

Trajectory exact_trajectory(const Mesh1D& mesh, const SpaceTimeFunction& exact,
                            const TimeGrid& grid, int derivative) {
  std::vector<Eigen::VectorXd> values;
  values.reserve(static_cast<size_t>(grid.node_count()));
  for (int n = 0; n <= grid.steps; ++n) {
    const double t = grid.node(n);
    values.push_back(
        nodal_interpolant(mesh, [&](double x) { return exact.eval(t, derivative, x); }));
  }
  return Trajectory(grid, std::move(values));
}

double linf_h_error(const Trajectory& u, const SpaceTimeFunction& exact, const Mesh1D& mesh,
                    const Eigen::MatrixXd& gram_h, int derivative) {
  const Trajectory reference = exact_trajectory(mesh, exact, u.grid(), derivative);
  return max_node_norm(trajectory_difference(u, reference), gram_h);
}

RhsFunction frechet_linearization_rhs(const Mesh1D& mesh, const SpaceTimeFunction& h_pert,
                                      const Trajectory& u_base, double horizon) {
  if (u_base.dim() != mesh.dim()) {
    throw std::invalid_argument("frechet_linearization_rhs: u_base dimension mismatch");
  }
  auto rhs_eval = [mesh, h_pert, base = u_base](double t, int) -> Eigen::VectorXd {
    const int dim = mesh.dim();
    const double h = mesh.h;
    const Eigen::VectorXd alpha = base.interpolate(t);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
    for (int e = 0; e <= dim; ++e) {
      const double left_val = e - 1 >= 0 ? alpha(e - 1) : 0.0;
      const double right_val = e < dim ? alpha(e) : 0.0;
      const double slope = (right_val - left_val) / h;
      const double xl = static_cast<double>(e) * h;
      const double xc = xl + 0.5 * h;
      const double g1 = xc - kGaussOffset * h;
      const double g2 = xc + kGaussOffset * h;
      const double cell = 0.5 * h * (h_pert.eval(t, 0, g1) + h_pert.eval(t, 0, g2));
      // phi' is -1/h on the left dof of the element and +1/h on the right dof.
      if (e - 1 >= 0) out(e - 1) -= slope * cell * (-1.0 / h);
      if (e < dim) out(e) -= slope * cell * (1.0 / h);
    }
    return out;
  };
  return RhsFunction(mesh.dim(), 0, horizon, rhs_eval);
}

Solution frechet_apply(const Mesh1D& mesh, const CoefficientField& a,
                       const SpaceTimeFunction& h_pert, const Solution& u_base,
                       const TimeGrid& grid, double lin_tol) {
  if (!(u_base.u.grid() == grid)) {
    throw std::invalid_argument("frechet_apply: u_base grid mismatch");
  }
  if (u_base.u.dim() != mesh.dim()) {
    throw std::invalid_argument("frechet_apply: u_base dimension mismatch");
  }

  ProblemData p = assemble_wave_problem(
      mesh, a, SpaceTimeFunction::zero(), [](double) { return 0.0; },
      [](double) { return 0.0; }, grid.horizon);
  p.f = frechet_linearization_rhs(mesh, h_pert, u_base.u, grid.horizon);
  return solve_forward(p, grid, lin_tol);
}

std::vector<TaylorRow> taylor_test(const Mesh1D& mesh, const CoefficientField& a,
                                   const SpaceTimeFunction& f,
                                   const std::function<double(double)>& u0,
                                   const std::function<double(double)>& u1,
                                   const SpaceTimeFunction& h_pert, const TimeGrid& grid,
                                   double lin_tol, const std::vector<double>& eps_list) {
  if (eps_list.size() < 3) {
    throw std::invalid_argument("taylor_test: eps_list needs at least 3 entries");
  }
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw std::invalid_argument("taylor_test: eps_list must be positive and decreasing");
    }
  }

  const ProblemData base_problem = assemble_wave_problem(mesh, a, f, u0, u1, grid.horizon);
  const Solution base = solve_forward(base_problem, grid, lin_tol);
  const Solution deriv = frechet_apply(mesh, a, h_pert, base, grid, lin_tol);
  const Eigen::MatrixXd& gram_h = base_problem.space->gram_h();

  std::vector<TaylorRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    CoefficientField perturbed{
        std::min(a.order, h_pert.order),
        [a, h_pert, eps](double t, int j, double x) {
          return a.eval(t, j, x) + eps * h_pert.eval(t, j, x);
        },
        a.lower_bound};
    const Solution shifted = [&]() -> Solution {
      try {
        const ProblemData p_eps =
            assemble_wave_problem(mesh, perturbed, f, u0, u1, grid.horizon);
        return solve_forward(p_eps, grid, lin_tol);
      } catch (const std::runtime_error& err) {
        throw std::runtime_error(std::string(err.what()) +
                                 " (perturbed coefficient at eps=" + std::to_string(eps) +
                                 "; shrink eps)");
      }
    }();

    std::vector<Eigen::VectorXd> delta;
    delta.reserve(static_cast<size_t>(grid.node_count()));
    for (int n = 0; n <= grid.steps; ++n) {
      delta.push_back(shifted.u.at(n) - base.u.at(n) - eps * deriv.u.at(n));
    }
    const double remainder = l2_time_norm(Trajectory(grid, std::move(delta)), gram_h);
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty() && rows.back().remainder > 0.0 && remainder > 0.0) {
      slope = std::log(rows.back().remainder / remainder) / std::log(rows.back().eps / eps);
    }
    rows.push_back(TaylorRow{eps, remainder, slope});
  }
  return rows;
}

}  // namespace hyperbreg
