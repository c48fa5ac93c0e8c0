#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hyperbreg {

/// Discrete Gelfand triple V -> H -> V* over one finite basis: a pair of Gram
/// matrices on the same basis.  Dual elements (members of V*) are represented
/// throughout by their pairing vectors r with r_i = <r, phi_i>; the discrete
/// dual norms are then r^T gram^{-1} r.
class SpaceDiscretization {
 public:
  SpaceDiscretization(Eigen::MatrixXd gram_h, Eigen::MatrixXd gram_v,
                      std::vector<std::string> labels = {});

  int dim() const { return static_cast<int>(gram_h_.rows()); }
  const Eigen::MatrixXd& gram_h() const { return gram_h_; }
  const Eigen::MatrixXd& gram_v() const { return gram_v_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// ||x||_H for a coefficient vector x.
  double norm_h(const Eigen::VectorXd& x) const;
  /// ||x||_V for a coefficient vector x.
  double norm_v(const Eigen::VectorXd& x) const;
  /// Discrete V*-norm sqrt(r^T gramV^{-1} r) of a pairing vector r.
  double dual_norm_v(const Eigen::VectorXd& r) const;
  /// Discrete H-norm sqrt(r^T gramH^{-1} r) of an H-pairing vector r.
  double dual_norm_h(const Eigen::VectorXd& r) const;

  bool gram_h_factorizable() const { return llt_h_ok_; }
  bool gram_v_factorizable() const { return llt_v_ok_; }

 private:
  Eigen::MatrixXd gram_h_;
  Eigen::MatrixXd gram_v_;
  std::vector<std::string> labels_;
  Eigen::LLT<Eigen::MatrixXd> llt_h_;
  Eigen::LLT<Eigen::MatrixXd> llt_v_;
  bool llt_h_ok_ = false;
  bool llt_v_ok_ = false;
};

enum class OperatorKind { VtoVdual, HtoH, VtoH };

std::string to_string(OperatorKind kind);

/// Time-dependent operator family G with derivatives up to a declared order.
/// eval(t, j) returns the m x m matrix of pairings <G^{(j)}(t) phi_j, phi_i>.
/// Evaluators must be pure functions of (t, j); instances are immutable and
/// safe to share across threads.
class OperatorFamily {
 public:
  using Evaluator = std::function<Eigen::MatrixXd(double, int)>;

  OperatorFamily(int dim, int order, OperatorKind kind, bool selfadjoint,
                 std::optional<double> coercivity, double horizon, Evaluator eval);

  /// Builds a family whose time derivatives are iterated central differences
  /// of the zeroth-order evaluator.  The base evaluator must be defined on a
  /// step-neighbourhood of [0, horizon].
  static OperatorFamily with_fd_derivatives(int dim, int order, OperatorKind kind,
                                            bool selfadjoint,
                                            std::optional<double> coercivity,
                                            double horizon,
                                            std::function<Eigen::MatrixXd(double)> base,
                                            double fd_step = 0.0);

  /// Identically-zero family.
  static OperatorFamily zero(int dim, OperatorKind kind, double horizon, int order = 6);

  Eigen::MatrixXd eval(double t, int derivative_order = 0) const;

  int dim() const { return dim_; }
  int order() const { return order_; }
  OperatorKind kind() const { return kind_; }
  bool selfadjoint() const { return selfadjoint_; }
  const std::optional<double>& coercivity() const { return coercivity_; }
  double horizon() const { return horizon_; }

 private:
  int dim_;
  int order_;
  OperatorKind kind_;
  bool selfadjoint_;
  std::optional<double> coercivity_;
  double horizon_;
  Evaluator eval_;
};

/// Time-dependent right-hand side as a family of dual pairing vectors,
/// eval(t, j)_i = <f^{(j)}(t), phi_i>.
class RhsFunction {
 public:
  using Evaluator = std::function<Eigen::VectorXd(double, int)>;

  RhsFunction(int dim, int order, double horizon, Evaluator eval);

  static RhsFunction with_fd_derivatives(int dim, int order, double horizon,
                                         std::function<Eigen::VectorXd(double)> base,
                                         double fd_step = 0.0);
  static RhsFunction zero(int dim, double horizon, int order = 6);

  Eigen::VectorXd eval(double t, int derivative_order = 0) const;

  int dim() const { return dim_; }
  int order() const { return order_; }
  double horizon() const { return horizon_; }

 private:
  int dim_;
  int order_;
  double horizon_;
  Evaluator eval_;
};

/// The full problem tuple (A, B, C, Q, f, u0, u1, T) on a discrete triple.
struct ProblemData {
  std::shared_ptr<const SpaceDiscretization> space;
  OperatorFamily A;
  OperatorFamily B;
  OperatorFamily C;
  OperatorFamily Q;
  RhsFunction f;
  Eigen::VectorXd u0;
  Eigen::VectorXd u1;
  double horizon;
};

/// Outcome of validate_problem: violations are data, not exceptions.  Each
/// entry is "tag(target): detail", e.g. "coercivity(A): ...".
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool contains(const std::string& tag) const;
};

/// Deterministic validation sample set: a uniform grid of 17 interior times
/// plus both endpoints of [0, T].
std::vector<double> validation_times(double horizon);

/// Checks every type invariant (Gram symmetry/positivity, H<=V domination,
/// operator kinds, self-adjointness, declared coercivity, derivative
/// consistency, shared horizon) at the deterministic sample set.
ValidationReport validate_problem(const ProblemData& p);

/// Garding shift: (A, Q) -> (A + lambda I, Q - lambda I), where I acts through
/// the H inner product, so its pairing matrix is lambda * gramH.  The sum of
/// the zeroth-order evaluations is unchanged.
std::pair<OperatorFamily, OperatorFamily> shift_garding(const OperatorFamily& A,
                                                        const OperatorFamily& Q,
                                                        double lambda,
                                                        const SpaceDiscretization& space);

/// Minimum over `sample_count` uniform times (endpoints included) of the
/// smallest generalized eigenvalue of (G(t), gram).  Nested refinements
/// (sample_count 2n-1 from n) make the estimate monotone non-increasing.
double estimate_coercivity(const OperatorFamily& G, const Eigen::MatrixXd& gram,
                           int sample_count);

}  // namespace hyperbreg
