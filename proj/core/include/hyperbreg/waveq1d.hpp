#pragma once

#include "hyperbreg/galerkin.hpp"
#include "hyperbreg/gelfand.hpp"
#include "hyperbreg/time_calculus.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hyperbreg {

/// Uniform P1 mesh on (0,1) with homogeneous Dirichlet conditions; the basis
/// consists of the hat functions at the interior nodes.
struct Mesh1D {
  int n_interior;
  double h;

  explicit Mesh1D(int n_interior_);

  int dim() const { return n_interior; }
  /// Interior node i = 0..dim()-1 sits at (i+1) h.
  double node(int i) const { return static_cast<double>(i + 1) * h; }
};

/// Scalar space-time function with analytic t-derivatives:
/// evaluator(t, j, x) = d^j/dt^j g(t, x).
struct SpaceTimeFunction {
  int order;
  std::function<double(double, int, double)> evaluator;

  double eval(double t, int j, double x) const;
  static SpaceTimeFunction zero(int order = 6);
};

/// Coefficient a(t, x) with a declared uniform lower bound a(t,x) >= lower_bound > 0.
struct CoefficientField {
  int order;
  std::function<double(double, int, double)> evaluator;
  double lower_bound;

  double eval(double t, int j, double x) const;
};

/// Assembles the wave problem u'' - (a u_x)_x = f with Dirichlet conditions:
/// gramH is the exact P1 mass matrix, gramV = unit stiffness + mass (full H1
/// norm), A(t) the a-weighted stiffness family with 2-point Gauss quadrature
/// per element, C the constant mass family, B = Q = 0.  Initial values are
/// interpolated at the nodes.  Coercivity constants are attached from the
/// deterministic sample estimate.
/// Throws if a falls below its lower bound at a quadrature point.
ProblemData assemble_wave_problem(const Mesh1D& mesh, const CoefficientField& a,
                                  const SpaceTimeFunction& f,
                                  const std::function<double(double)>& u0,
                                  const std::function<double(double)>& u1, double horizon);

/// A manufactured verification fixture: coefficient, forcing, initial data
/// and the exact solution with t-derivatives to any requested order.
struct WaveCase {
  std::string name;
  CoefficientField a;
  SpaceTimeFunction f;
  std::function<double(double)> u0;
  std::function<double(double)> u1;
  SpaceTimeFunction exact;
};

/// Known cases: "static-sine" (a = 1, u = sin(pi x) cos(pi t), f = 0),
/// "timedep-sine" (a = 1 + sin(t)/2, u = sin(pi x) cos t), and
/// "poly-time" (a = 1, u = sin(pi x)(1 + t + t^2/2)).
WaveCase manufactured_case(const std::string& name);

std::vector<std::string> manufactured_case_names();

/// Nodal interpolant of a function of x on the interior nodes.
Eigen::VectorXd nodal_interpolant(const Mesh1D& mesh, const std::function<double(double)>& fn);

/// Trajectory of nodal interpolants of the j-th t-derivative of `exact`.
Trajectory exact_trajectory(const Mesh1D& mesh, const SpaceTimeFunction& exact,
                            const TimeGrid& grid, int derivative = 0);

/// max over nodes of the H-norm of (u - nodal interpolant of exact^(derivative)).
double linf_h_error(const Trajectory& u, const SpaceTimeFunction& exact, const Mesh1D& mesh,
                    const Eigen::MatrixXd& gram_h, int derivative = 0);

/// Linearization right-hand side pairings
/// <g(t), phi_i> = -int h(t,x) d_x u_base(t,x) phi_i'(x) dx, with d_x u_base
/// piecewise constant per element and u_base interpolated linearly in time.
RhsFunction frechet_linearization_rhs(const Mesh1D& mesh, const SpaceTimeFunction& h_pert,
                                      const Trajectory& u_base, double horizon);

/// Directional derivative of the coefficient-to-solution map at `a` in
/// direction h: solves the same wave problem with zero initial data and the
/// linearization right-hand side above.
Solution frechet_apply(const Mesh1D& mesh, const CoefficientField& a,
                       const SpaceTimeFunction& h_pert, const Solution& u_base,
                       const TimeGrid& grid, double lin_tol);

struct TaylorRow {
  double eps;
  double remainder;  // || F(a+eps h) - F(a) - eps dF(a)[h] ||_{L2(I;H)}
  double slope;      // consecutive log-ratio; NaN on the first row
};

/// Taylor-remainder verification of frechet_apply.  F is evaluated by full
/// forward solves with the perturbed coefficient; the perturbed coefficient
/// must stay above a's declared lower bound, otherwise an error asks for a
/// smaller eps.  eps_list must be strictly decreasing with >= 3 entries.
std::vector<TaylorRow> taylor_test(const Mesh1D& mesh, const CoefficientField& a,
                                   const SpaceTimeFunction& f,
                                   const std::function<double(double)>& u0,
                                   const std::function<double(double)>& u1,
                                   const SpaceTimeFunction& h_pert, const TimeGrid& grid,
                                   double lin_tol, const std::vector<double>& eps_list);

}  // namespace hyperbreg
