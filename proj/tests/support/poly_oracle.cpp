#include "support/poly_oracle.hpp"

#include <Eigen/LU>

#include <stdexcept>

namespace hyperbreg::testing {

namespace {

// Normalized series coefficients: s_i = g^(i)(0) / i!.  For a polynomial
// given as sum_i G_i t^i the coefficients G_i already are that series.
Eigen::MatrixXd series_at(const MatPoly& coeffs, int i, int m) {
  if (i < 0 || i >= static_cast<int>(coeffs.size())) return Eigen::MatrixXd::Zero(m, m);
  return coeffs[static_cast<size_t>(i)];
}

Eigen::VectorXd series_at(const VecPoly& coeffs, int i, int m) {
  if (i < 0 || i >= static_cast<int>(coeffs.size())) return Eigen::VectorXd::Zero(m);
  return coeffs[static_cast<size_t>(i)];
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= static_cast<double>(i);
  return out;
}

}  // namespace

std::vector<Eigen::VectorXd> oracle_compatible_ivs(const MatPoly& c_coeffs,
                                                   const MatPoly& b_coeffs,
                                                   const MatPoly& a_coeffs,
                                                   const MatPoly& q_coeffs,
                                                   const VecPoly& f_coeffs,
                                                   const Eigen::VectorXd& u0,
                                                   const Eigen::VectorXd& u1, int k) {
  const int m = static_cast<int>(u0.size());
  Eigen::FullPivLU<Eigen::MatrixXd> c0_lu(series_at(c_coeffs, 0, m));
  if (!c0_lu.isInvertible()) throw std::runtime_error("oracle: C(0) singular");

  // alpha[i] = alpha^(i)(0) / i! (normalized series coefficient).
  std::vector<Eigen::VectorXd> alpha;
  alpha.push_back(u0);
  alpha.push_back(u1);

  auto alpha_prime = [&](int i) -> Eigen::VectorXd {
    // (alpha')_i = (i+1) alpha_{i+1}; absent coefficients are zero.
    if (i + 1 >= static_cast<int>(alpha.size())) return Eigen::VectorXd::Zero(m);
    return static_cast<double>(i + 1) * alpha[static_cast<size_t>(i + 1)];
  };

  for (int kappa = 0; kappa <= k - 1; ++kappa) {
    // Series coefficient kappa of (C alpha')' + B alpha' + (A+Q) alpha - F,
    // evaluated with alpha_{kappa+2} temporarily absent (treated as zero).
    Eigen::VectorXd residual = Eigen::VectorXd::Zero(m);
    // (C alpha')' at index kappa is (kappa+1) * (C alpha')_{kappa+1}.
    Eigen::VectorXd c_alpha_prime = Eigen::VectorXd::Zero(m);
    for (int i = 0; i <= kappa + 1; ++i) {
      c_alpha_prime += series_at(c_coeffs, i, m) * alpha_prime(kappa + 1 - i);
    }
    residual += static_cast<double>(kappa + 1) * c_alpha_prime;
    for (int i = 0; i <= kappa; ++i) {
      residual += series_at(b_coeffs, i, m) * alpha_prime(kappa - i);
      residual += (series_at(a_coeffs, i, m) + series_at(q_coeffs, i, m)) *
                  alpha[static_cast<size_t>(kappa - i)];
    }
    residual -= series_at(f_coeffs, kappa, m);

    // The missing alpha_{kappa+2} enters through
    // (kappa+1) C_0 (alpha')_{kappa+1} = (kappa+1)(kappa+2) C_0 alpha_{kappa+2}.
    const double weight = static_cast<double>(kappa + 1) * static_cast<double>(kappa + 2);
    alpha.push_back(c0_lu.solve(-residual / weight));
  }

  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(k) + 2);
  for (int j = 0; j <= k + 1; ++j) {
    out.push_back(factorial(j) * alpha[static_cast<size_t>(j)]);
  }
  return out;
}

}  // namespace hyperbreg::testing
