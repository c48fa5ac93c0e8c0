#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hyperbreg {

/// Uniform grid on [0, T] with N steps; node n sits at n * dt (computed as a
/// product, not by cumulative addition).
struct TimeGrid {
  double horizon;
  int steps;

  TimeGrid(double horizon_, int steps_);

  double dt() const { return horizon / static_cast<double>(steps); }
  double node(int n) const { return static_cast<double>(n) * dt(); }
  int node_count() const { return steps + 1; }

  bool operator==(const TimeGrid& other) const = default;
};

/// Vector-valued function of time sampled at the grid nodes.  Values between
/// nodes are linearly interpolated.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, std::vector<Eigen::VectorXd> values);

  /// Constant-zero trajectory of the given vector dimension.
  static Trajectory zero(TimeGrid grid, int dim);

  const TimeGrid& grid() const { return grid_; }
  int dim() const { return static_cast<int>(values_.front().size()); }
  const Eigen::VectorXd& at(int n) const { return values_.at(static_cast<size_t>(n)); }
  const std::vector<Eigen::VectorXd>& values() const { return values_; }

  /// Linear interpolation; t is clamped to [0, T].
  Eigen::VectorXd interpolate(double t) const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::VectorXd> values_;
};

/// R_{X,g}: v -> g + int_0^t v(s) ds, cumulative trapezoid quadrature.
/// Exact for integrands affine in t.
Trajectory antiderivative(const Trajectory& v, const Eigen::VectorXd& seed);

/// Consecutive composition of antiderivative operators with seeds
/// [u_m, ..., u_n]: the last seed is applied first, the first seed last.
/// An empty seed list returns v unchanged.
Trajectory compose_antiderivatives(const Trajectory& v,
                                   const std::vector<Eigen::VectorXd>& seeds);

/// Second-order finite-difference time derivative: central differences at
/// interior nodes, one-sided three-point stencils at the endpoints.  Exact
/// for trajectories quadratic in t.  Requires N >= 2.
Trajectory fd_time_derivative(const Trajectory& u);

/// max_n sqrt(x_n^T gram x_n).
double max_node_norm(const Trajectory& u, const Eigen::MatrixXd& gram);

/// sqrt of the trapezoid-in-time integral of x(t)^T gram x(t).
double l2_time_norm(const Trajectory& u, const Eigen::MatrixXd& gram);

/// Node-wise difference a - b (grids must match).
Trajectory trajectory_difference(const Trajectory& a, const Trajectory& b);

}  // namespace hyperbreg
