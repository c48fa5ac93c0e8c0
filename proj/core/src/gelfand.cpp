#include "hyperbreg/gelfand.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hyperbreg {

namespace {

double max_abs(const Eigen::MatrixXd& mat) { return mat.cwiseAbs().maxCoeff(); }

void check_square(const Eigen::MatrixXd& mat, const char* what) {
  if (mat.rows() != mat.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
}

}  // namespace

SpaceDiscretization::SpaceDiscretization(Eigen::MatrixXd gram_h, Eigen::MatrixXd gram_v,
                                         std::vector<std::string> labels)
    : gram_h_(std::move(gram_h)), gram_v_(std::move(gram_v)), labels_(std::move(labels)) {
  check_square(gram_h_, "SpaceDiscretization");
  check_square(gram_v_, "SpaceDiscretization");
  if (gram_h_.rows() != gram_v_.rows()) {
    throw std::invalid_argument("SpaceDiscretization: gramH and gramV dimensions differ");
  }
  llt_h_.compute(gram_h_);
  llt_h_ok_ = llt_h_.info() == Eigen::Success;
  llt_v_.compute(gram_v_);
  llt_v_ok_ = llt_v_.info() == Eigen::Success;
}

double SpaceDiscretization::norm_h(const Eigen::VectorXd& x) const {
  return std::sqrt(std::max(0.0, x.dot(gram_h_ * x)));
}

double SpaceDiscretization::norm_v(const Eigen::VectorXd& x) const {
  return std::sqrt(std::max(0.0, x.dot(gram_v_ * x)));
}

double SpaceDiscretization::dual_norm_v(const Eigen::VectorXd& r) const {
  if (!llt_v_ok_) throw std::runtime_error("SpaceDiscretization: gramV is not SPD");
  return std::sqrt(std::max(0.0, r.dot(llt_v_.solve(r))));
}

double SpaceDiscretization::dual_norm_h(const Eigen::VectorXd& r) const {
  if (!llt_h_ok_) throw std::runtime_error("SpaceDiscretization: gramH is not SPD");
  return std::sqrt(std::max(0.0, r.dot(llt_h_.solve(r))));
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::VtoVdual: return "V->V*";
    case OperatorKind::HtoH: return "H->H";
    case OperatorKind::VtoH: return "V->H";
  }
  return "?";
}

OperatorFamily::OperatorFamily(int dim, int order, OperatorKind kind, bool selfadjoint,
                               std::optional<double> coercivity, double horizon,
                               Evaluator eval)
    : dim_(dim),
      order_(order),
      kind_(kind),
      selfadjoint_(selfadjoint),
      coercivity_(coercivity),
      horizon_(horizon),
      eval_(std::move(eval)) {
  if (dim_ < 1) throw std::invalid_argument("OperatorFamily: dim must be >= 1");
  if (order_ < 0) throw std::invalid_argument("OperatorFamily: order must be >= 0");
  if (!(horizon_ > 0.0)) throw std::invalid_argument("OperatorFamily: horizon must be > 0");
  if (!eval_) throw std::invalid_argument("OperatorFamily: evaluator must be callable");
}

Eigen::MatrixXd OperatorFamily::eval(double t, int derivative_order) const {
  if (derivative_order < 0 || derivative_order > order_) {
    std::ostringstream msg;
    msg << "OperatorFamily: derivative order " << derivative_order
        << " outside declared range [0, " << order_ << "]";
    throw std::out_of_range(msg.str());
  }
  Eigen::MatrixXd mat = eval_(t, derivative_order);
  if (mat.rows() != dim_ || mat.cols() != dim_) {
    throw std::runtime_error("OperatorFamily: evaluator returned wrong dimensions");
  }
  return mat;
}

OperatorFamily OperatorFamily::with_fd_derivatives(int dim, int order, OperatorKind kind,
                                                   bool selfadjoint,
                                                   std::optional<double> coercivity,
                                                   double horizon,
                                                   std::function<Eigen::MatrixXd(double)> base,
                                                   double fd_step) {
  if (fd_step <= 0.0) fd_step = 1e-4 * std::max(1.0, horizon);
  // Iterated central differences; step errors are O(step^2) per level.
  auto eval = [base, fd_step](double t, int j) -> Eigen::MatrixXd {
    std::function<Eigen::MatrixXd(double, int)> go = [&](double s, int jj) -> Eigen::MatrixXd {
      if (jj == 0) return base(s);
      return (go(s + fd_step, jj - 1) - go(s - fd_step, jj - 1)) / (2.0 * fd_step);
    };
    return go(t, j);
  };
  return OperatorFamily(dim, order, kind, selfadjoint, coercivity, horizon, eval);
}

OperatorFamily OperatorFamily::zero(int dim, OperatorKind kind, double horizon, int order) {
  return OperatorFamily(dim, order, kind, false, std::nullopt, horizon,
                        [dim](double, int) { return Eigen::MatrixXd::Zero(dim, dim); });
}

RhsFunction::RhsFunction(int dim, int order, double horizon, Evaluator eval)
    : dim_(dim), order_(order), horizon_(horizon), eval_(std::move(eval)) {
  if (dim_ < 1) throw std::invalid_argument("RhsFunction: dim must be >= 1");
  if (order_ < 0) throw std::invalid_argument("RhsFunction: order must be >= 0");
  if (!(horizon_ > 0.0)) throw std::invalid_argument("RhsFunction: horizon must be > 0");
  if (!eval_) throw std::invalid_argument("RhsFunction: evaluator must be callable");
}

Eigen::VectorXd RhsFunction::eval(double t, int derivative_order) const {
  if (derivative_order < 0 || derivative_order > order_) {
    std::ostringstream msg;
    msg << "RhsFunction: derivative order " << derivative_order
        << " outside declared range [0, " << order_ << "]";
    throw std::out_of_range(msg.str());
  }
  Eigen::VectorXd vec = eval_(t, derivative_order);
  if (vec.size() != dim_) {
    throw std::runtime_error("RhsFunction: evaluator returned wrong dimension");
  }
  return vec;
}

RhsFunction RhsFunction::with_fd_derivatives(int dim, int order, double horizon,
                                             std::function<Eigen::VectorXd(double)> base,
                                             double fd_step) {
  if (fd_step <= 0.0) fd_step = 1e-4 * std::max(1.0, horizon);
  auto eval = [base, fd_step](double t, int j) -> Eigen::VectorXd {
    std::function<Eigen::VectorXd(double, int)> go = [&](double s, int jj) -> Eigen::VectorXd {
      if (jj == 0) return base(s);
      return (go(s + fd_step, jj - 1) - go(s - fd_step, jj - 1)) / (2.0 * fd_step);
    };
    return go(t, j);
  };
  return RhsFunction(dim, order, horizon, eval);
}

RhsFunction RhsFunction::zero(int dim, double horizon, int order) {
  return RhsFunction(dim, order, horizon,
                     [dim](double, int) { return Eigen::VectorXd::Zero(dim); });
}

bool ValidationReport::contains(const std::string& tag) const {
  return std::any_of(violations.begin(), violations.end(), [&](const std::string& v) {
    return v.find(tag) != std::string::npos;
  });
}

std::vector<double> validation_times(double horizon) {
  // 17 uniform interior points plus the endpoints.
  std::vector<double> times;
  times.reserve(19);
  for (int i = 0; i <= 18; ++i) times.push_back(horizon * static_cast<double>(i) / 18.0);
  return times;
}

namespace {

bool symmetric_to(const Eigen::MatrixXd& mat, double rel_tol) {
  const double scale = std::max(max_abs(mat), std::numeric_limits<double>::min());
  return max_abs(mat - mat.transpose()) <= rel_tol * scale;
}

std::optional<double> smallest_eigenvalue(const Eigen::MatrixXd& mat) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::nullopt;
  return es.eigenvalues().minCoeff();
}

std::optional<double> smallest_generalized_eigenvalue(const Eigen::MatrixXd& mat,
                                                      const Eigen::MatrixXd& gram) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, gram,
                                                               Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) return std::nullopt;
  return es.eigenvalues().minCoeff();
}

std::optional<double> largest_generalized_eigenvalue(const Eigen::MatrixXd& mat,
                                                     const Eigen::MatrixXd& gram) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, gram,
                                                               Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) return std::nullopt;
  return es.eigenvalues().maxCoeff();
}

class ReportBuilder {
 public:
  void add(const std::string& tag, const std::string& detail) {
    report_.violations.push_back(detail.empty() ? tag : tag + ": " + detail);
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

void check_selfadjoint(const OperatorFamily& fam, const char* name,
                       const std::vector<double>& times, ReportBuilder& out) {
  if (!fam.selfadjoint()) return;
  for (double t : times) {
    const Eigen::MatrixXd mat = fam.eval(t, 0);
    const double scale = std::max(max_abs(mat), std::numeric_limits<double>::min());
    const double asym = max_abs(mat - mat.transpose());
    if (asym > 1e-12 * scale) {
      std::ostringstream msg;
      msg << "asymmetry " << asym << " exceeds 1e-12 * " << scale << " at t=" << t;
      out.add(std::string("selfadjoint(") + name + ")", msg.str());
      return;
    }
  }
}

void check_derivative_consistency(const char* name, int order, double horizon,
                                  const std::function<double(double, int)>& fd_gap,
                                  const std::function<double(double, int)>& scale_at,
                                  ReportBuilder& out) {
  // Central differences of eval(.,j) must match eval(.,j+1) to O(step^2) at
  // interior sample times.  The constant absorbs the unknown third derivative;
  // the check is a sampled surrogate, not a proof.
  const double step = 1e-3 * std::max(1.0, horizon);
  for (int j = 0; j + 1 <= order; ++j) {
    double worst_gap = 0.0;
    double worst_scale = 1.0;
    double worst_t = 0.0;
    for (double t : validation_times(horizon)) {
      if (t - step < 0.0 || t + step > horizon) continue;
      const double gap = fd_gap(t, j);
      if (gap > worst_gap) {
        worst_gap = gap;
        worst_scale = std::max(1.0, scale_at(t, j + 1));
        worst_t = t;
      }
    }
    const double tol = 100.0 * step * step * worst_scale;
    if (worst_gap > tol) {
      std::ostringstream msg;
      msg << "order " << j << " -> " << j + 1 << " gap " << worst_gap << " > " << tol
          << " at t=" << worst_t;
      out.add(std::string("derivative-consistency(") + name + ")", msg.str());
      return;
    }
  }
}

void check_family_derivatives(const OperatorFamily& fam, const char* name,
                              ReportBuilder& out) {
  const double horizon = fam.horizon();
  const double step = 1e-3 * std::max(1.0, horizon);
  auto gap = [&](double t, int j) {
    const Eigen::MatrixXd fd = (fam.eval(t + step, j) - fam.eval(t - step, j)) / (2.0 * step);
    return max_abs(fd - fam.eval(t, j + 1));
  };
  auto scale = [&](double t, int j) { return max_abs(fam.eval(t, j)); };
  check_derivative_consistency(name, fam.order(), horizon, gap, scale, out);
}

void check_rhs_derivatives(const RhsFunction& f, ReportBuilder& out) {
  const double horizon = f.horizon();
  const double step = 1e-3 * std::max(1.0, horizon);
  auto gap = [&](double t, int j) {
    const Eigen::VectorXd fd = (f.eval(t + step, j) - f.eval(t - step, j)) / (2.0 * step);
    return (fd - f.eval(t, j + 1)).cwiseAbs().maxCoeff();
  };
  auto scale = [&](double t, int j) { return f.eval(t, j).cwiseAbs().maxCoeff(); };
  check_derivative_consistency("f", f.order(), horizon, gap, scale, out);
}

void check_coercivity(const OperatorFamily& fam, const char* name,
                      const SpaceDiscretization& space, const std::vector<double>& times,
                      ReportBuilder& out) {
  if (!fam.coercivity()) {
    out.add(std::string("coercivity(") + name + ")", "no coercivity constant declared");
    return;
  }
  const double bound = *fam.coercivity();
  const Eigen::MatrixXd& gram =
      fam.kind() == OperatorKind::VtoVdual ? space.gram_v() : space.gram_h();
  for (double t : times) {
    Eigen::MatrixXd mat = fam.eval(t, 0);
    mat = 0.5 * (mat + mat.transpose());
    const auto lambda_min = smallest_generalized_eigenvalue(mat, gram);
    if (!lambda_min) {
      out.add(std::string("coercivity(") + name + ")", "generalized eigensolve failed");
      return;
    }
    if (*lambda_min < bound - 1e-10) {
      std::ostringstream msg;
      msg << "smallest generalized eigenvalue " << *lambda_min << " < declared " << bound
          << " at t=" << t;
      out.add(std::string("coercivity(") + name + ")", msg.str());
      return;
    }
  }
}

}  // namespace

ValidationReport validate_problem(const ProblemData& p) {
  ReportBuilder out;
  const SpaceDiscretization& space = *p.space;
  const std::vector<double> times = validation_times(p.horizon);

  if (!symmetric_to(space.gram_h(), 1e-12)) out.add("symmetry(gramH)", "");
  if (!symmetric_to(space.gram_v(), 1e-12)) out.add("symmetry(gramV)", "");

  const auto min_h = smallest_eigenvalue(0.5 * (space.gram_h() + space.gram_h().transpose()));
  if (!min_h || *min_h <= 0.0) out.add("posdef(gramH)", "smallest eigenvalue not > 0");
  const auto min_v = smallest_eigenvalue(0.5 * (space.gram_v() + space.gram_v().transpose()));
  if (!min_v || *min_v <= 0.0) out.add("posdef(gramV)", "smallest eigenvalue not > 0");

  if (min_h && min_v && *min_h > 0.0 && *min_v > 0.0) {
    const auto lambda_max = largest_generalized_eigenvalue(
        0.5 * (space.gram_h() + space.gram_h().transpose()),
        0.5 * (space.gram_v() + space.gram_v().transpose()));
    if (!lambda_max || *lambda_max > 1.0 + 1e-12) {
      out.add("domination(gramH,gramV)", "||.||_H <= ||.||_V fails on the discrete space");
    }
  }

  if (p.A.kind() != OperatorKind::VtoVdual) out.add("kind(A)", "expected V->V*");
  if (p.C.kind() != OperatorKind::HtoH) out.add("kind(C)", "expected H->H");
  if (!p.A.selfadjoint()) out.add("selfadjoint(A)", "flag not set");
  if (!p.C.selfadjoint()) out.add("selfadjoint(C)", "flag not set");

  struct Named {
    const OperatorFamily* fam;
    const char* name;
  };
  const Named families[] = {{&p.A, "A"}, {&p.B, "B"}, {&p.C, "C"}, {&p.Q, "Q"}};
  for (const auto& [fam, name] : families) {
    if (fam->dim() != space.dim()) out.add(std::string("dim(") + name + ")", "");
    if (std::abs(fam->horizon() - p.horizon) > 1e-12 * std::max(1.0, p.horizon)) {
      out.add(std::string("horizon(") + name + ")", "family horizon differs from problem T");
    }
    check_selfadjoint(*fam, name, times, out);
    check_family_derivatives(*fam, name, out);
  }
  if (p.f.dim() != space.dim()) out.add("dim(f)", "");
  if (std::abs(p.f.horizon() - p.horizon) > 1e-12 * std::max(1.0, p.horizon)) {
    out.add("horizon(f)", "rhs horizon differs from problem T");
  }
  check_rhs_derivatives(p.f, out);

  if (min_v && *min_v > 0.0) check_coercivity(p.A, "A", space, times, out);
  if (min_h && *min_h > 0.0) check_coercivity(p.C, "C", space, times, out);

  if (p.u0.size() != space.dim()) out.add("dim(u0)", "");
  if (p.u1.size() != space.dim()) out.add("dim(u1)", "");

  return out.take();
}

std::pair<OperatorFamily, OperatorFamily> shift_garding(const OperatorFamily& A,
                                                        const OperatorFamily& Q,
                                                        double lambda,
                                                        const SpaceDiscretization& space) {
  if (A.kind() != OperatorKind::VtoVdual) {
    throw std::invalid_argument("shift_garding: A must have kind V->V*");
  }
  if (Q.kind() != OperatorKind::VtoH) {
    throw std::invalid_argument("shift_garding: Q must have kind V->H");
  }
  const Eigen::MatrixXd shift = lambda * space.gram_h();
  auto shifted_coercivity = A.coercivity();
  OperatorFamily shifted_a(
      A.dim(), A.order(), A.kind(), A.selfadjoint(), shifted_coercivity, A.horizon(),
      [A, shift](double t, int j) -> Eigen::MatrixXd {
        Eigen::MatrixXd mat = A.eval(t, j);
        if (j == 0) mat += shift;
        return mat;
      });
  OperatorFamily shifted_q(
      Q.dim(), Q.order(), Q.kind(), Q.selfadjoint(), Q.coercivity(), Q.horizon(),
      [Q, shift](double t, int j) -> Eigen::MatrixXd {
        Eigen::MatrixXd mat = Q.eval(t, j);
        if (j == 0) mat -= shift;
        return mat;
      });
  return {std::move(shifted_a), std::move(shifted_q)};
}

double estimate_coercivity(const OperatorFamily& G, const Eigen::MatrixXd& gram,
                           int sample_count) {
  if (!G.selfadjoint()) {
    throw std::invalid_argument("estimate_coercivity: requires selfadjoint family");
  }
  if (sample_count < 2) {
    throw std::invalid_argument("estimate_coercivity: sample_count must be >= 2");
  }
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sample_count; ++i) {
    const double t = G.horizon() * static_cast<double>(i) / static_cast<double>(sample_count - 1);
    Eigen::MatrixXd mat = G.eval(t, 0);
    mat = 0.5 * (mat + mat.transpose());
    const auto lambda_min = smallest_generalized_eigenvalue(mat, gram);
    if (!lambda_min) throw std::runtime_error("estimate_coercivity: eigensolve failed");
    lo = std::min(lo, *lambda_min);
  }
  return lo;
}

}  // namespace hyperbreg
