#pragma once

#include "hyperbreg/galerkin.hpp"
#include "hyperbreg/gelfand.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace hyperbreg::testing {

using MatPoly = std::vector<Eigen::MatrixXd>;  // G(t) = sum_i coeffs[i] t^i
using VecPoly = std::vector<Eigen::VectorXd>;

/// Family with exact polynomial time dependence; derivatives beyond the
/// degree are zero.
OperatorFamily poly_family(const MatPoly& coeffs, OperatorKind kind, bool selfadjoint,
                           std::optional<double> coercivity, double horizon, int order = 6);

RhsFunction poly_rhs(const VecPoly& coeffs, int dim, double horizon, int order = 6);

/// m = 1 space with gramH = gramV = [1].
std::shared_ptr<const SpaceDiscretization> scalar_space();

/// Scalar oscillator u'' + omega^2 u = 0, exact solution
/// u0 cos(omega t) + (u1/omega) sin(omega t).
ProblemData oscillator(double omega, double horizon, double u0, double u1);

/// Random polynomial-in-t operator families of the given degree (A, C with
/// symmetric coefficients and dominant constant part), plus the raw
/// coefficient lists for oracle arithmetic.
struct PolyProblem {
  ProblemData p;
  MatPoly a, b, c, q;
  VecPoly f;
};
PolyProblem random_poly_problem(unsigned seed, int m, int degree);

/// m = 1 problem with C = 1, A = a0, B = Q = 0 and forcing chosen so the
/// exact solution is the polynomial 1 + t + t^2/2.
struct PolyScalarCase {
  ProblemData p;
  std::function<double(double, int)> exact;  // (t, derivative order)
};
PolyScalarCase poly_scalar_case(double a0, double horizon);

}  // namespace hyperbreg::testing
