#include "support/fixtures.hpp"

#include <cmath>
#include <random>

namespace hyperbreg::testing {

namespace {

double falling_factorial(int i, int j) {
  double out = 1.0;
  for (int q = 0; q < j; ++q) out *= static_cast<double>(i - q);
  return out;
}

Eigen::MatrixXd eval_mat_poly(const MatPoly& coeffs, double t, int j) {
  const int m = static_cast<int>(coeffs.front().rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (int i = j; i < static_cast<int>(coeffs.size()); ++i) {
    out += coeffs[static_cast<size_t>(i)] * (falling_factorial(i, j) * std::pow(t, i - j));
  }
  return out;
}

Eigen::VectorXd eval_vec_poly(const VecPoly& coeffs, int dim, double t, int j) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  for (int i = j; i < static_cast<int>(coeffs.size()); ++i) {
    out += coeffs[static_cast<size_t>(i)] * (falling_factorial(i, j) * std::pow(t, i - j));
  }
  return out;
}

}  // namespace

OperatorFamily poly_family(const MatPoly& coeffs, OperatorKind kind, bool selfadjoint,
                           std::optional<double> coercivity, double horizon, int order) {
  const int m = static_cast<int>(coeffs.front().rows());
  return OperatorFamily(m, order, kind, selfadjoint, coercivity, horizon,
                        [coeffs](double t, int j) { return eval_mat_poly(coeffs, t, j); });
}

RhsFunction poly_rhs(const VecPoly& coeffs, int dim, double horizon, int order) {
  return RhsFunction(dim, order, horizon, [coeffs, dim](double t, int j) {
    return eval_vec_poly(coeffs, dim, t, j);
  });
}

std::shared_ptr<const SpaceDiscretization> scalar_space() {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  return std::make_shared<SpaceDiscretization>(one, one);
}

ProblemData oscillator(double omega, double horizon, double u0, double u1) {
  auto space = scalar_space();
  const Eigen::MatrixXd stiff = omega * omega * Eigen::MatrixXd::Ones(1, 1);
  return ProblemData{
      space,
      poly_family({stiff}, OperatorKind::VtoVdual, true, omega * omega, horizon),
      OperatorFamily::zero(1, OperatorKind::HtoH, horizon),
      poly_family({Eigen::MatrixXd::Ones(1, 1)}, OperatorKind::HtoH, true, 1.0, horizon),
      OperatorFamily::zero(1, OperatorKind::VtoH, horizon),
      RhsFunction::zero(1, horizon),
      Eigen::VectorXd::Constant(1, u0),
      Eigen::VectorXd::Constant(1, u1),
      horizon};
}

PolyProblem random_poly_problem(unsigned seed, int m, int degree) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  auto random_matrix = [&]() {
    Eigen::MatrixXd mat(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) mat(i, j) = uniform(rng);
    }
    return mat;
  };
  auto symmetric = [&]() {
    const Eigen::MatrixXd mat = random_matrix();
    return Eigen::MatrixXd(0.5 * (mat + mat.transpose()));
  };

  const double horizon = 1.0;
  MatPoly a, b, c, q;
  VecPoly f;
  for (int i = 0; i <= degree; ++i) {
    Eigen::MatrixXd a_i = symmetric();
    Eigen::MatrixXd c_i = symmetric();
    if (i == 0) {
      a_i += 2.0 * Eigen::MatrixXd::Identity(m, m);
      c_i += 2.0 * Eigen::MatrixXd::Identity(m, m);
    } else {
      // keep A(t), C(t) positive definite on [0, 1]
      a_i *= 0.3;
      c_i *= 0.3;
    }
    a.push_back(a_i);
    c.push_back(c_i);
    b.push_back(random_matrix());
    q.push_back(random_matrix());
    Eigen::VectorXd f_i(m);
    for (int r = 0; r < m; ++r) f_i(r) = uniform(rng);
    f.push_back(f_i);
  }

  Eigen::VectorXd u0(m), u1(m);
  for (int r = 0; r < m; ++r) {
    u0(r) = uniform(rng);
    u1(r) = uniform(rng);
  }

  auto space = std::make_shared<SpaceDiscretization>(Eigen::MatrixXd::Identity(m, m),
                                                     Eigen::MatrixXd::Identity(m, m));
  ProblemData p{space,
                poly_family(a, OperatorKind::VtoVdual, true, std::nullopt, horizon),
                poly_family(b, OperatorKind::HtoH, false, std::nullopt, horizon),
                poly_family(c, OperatorKind::HtoH, true, std::nullopt, horizon),
                poly_family(q, OperatorKind::VtoH, false, std::nullopt, horizon),
                poly_rhs(f, m, horizon),
                u0,
                u1,
                horizon};
  return PolyProblem{std::move(p), std::move(a), std::move(b), std::move(c), std::move(q),
                     std::move(f)};
}

PolyScalarCase poly_scalar_case(double a0, double horizon) {
  auto space = scalar_space();
  auto poly = [](double t, int j) -> double {
    switch (j) {
      case 0: return 1.0 + t + 0.5 * t * t;
      case 1: return 1.0 + t;
      case 2: return 1.0;
      default: return 0.0;
    }
  };
  // u'' + a0 u = f  =>  f = 1 + a0 (1 + t + t^2/2), a polynomial of degree 2.
  VecPoly f_coeffs{Eigen::VectorXd::Constant(1, 1.0 + a0), Eigen::VectorXd::Constant(1, a0),
                   Eigen::VectorXd::Constant(1, 0.5 * a0)};
  ProblemData p{space,
                poly_family({a0 * Eigen::MatrixXd::Ones(1, 1)}, OperatorKind::VtoVdual, true,
                            a0, horizon),
                OperatorFamily::zero(1, OperatorKind::HtoH, horizon),
                poly_family({Eigen::MatrixXd::Ones(1, 1)}, OperatorKind::HtoH, true, 1.0,
                            horizon),
                OperatorFamily::zero(1, OperatorKind::VtoH, horizon),
                poly_rhs(f_coeffs, 1, horizon),
                Eigen::VectorXd::Constant(1, poly(0.0, 0)),
                Eigen::VectorXd::Constant(1, poly(0.0, 1)),
                horizon};
  return PolyScalarCase{std::move(p), poly};
}

}  // namespace hyperbreg::testing
