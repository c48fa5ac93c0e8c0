#include "hyperbreg/time_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hyperbreg {

TimeGrid::TimeGrid(double horizon_, int steps_) : horizon(horizon_), steps(steps_) {
  if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
  if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be >= 1");
}

Trajectory::Trajectory(TimeGrid grid, std::vector<Eigen::VectorXd> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != static_cast<size_t>(grid_.node_count())) {
    throw std::invalid_argument("Trajectory: values.size() must equal N+1");
  }
  const Eigen::Index dim = values_.front().size();
  for (const auto& v : values_) {
    if (v.size() != dim) throw std::invalid_argument("Trajectory: inconsistent vector sizes");
  }
}

Trajectory Trajectory::zero(TimeGrid grid, int dim) {
  return Trajectory(grid, std::vector<Eigen::VectorXd>(static_cast<size_t>(grid.node_count()),
                                                       Eigen::VectorXd::Zero(dim)));
}

Eigen::VectorXd Trajectory::interpolate(double t) const {
  const double dt = grid_.dt();
  const double s = std::clamp(t, 0.0, grid_.horizon) / dt;
  const int n = std::min(static_cast<int>(std::floor(s)), grid_.steps - 1);
  const double w = s - static_cast<double>(n);
  return (1.0 - w) * values_[static_cast<size_t>(n)] + w * values_[static_cast<size_t>(n) + 1];
}

Trajectory antiderivative(const Trajectory& v, const Eigen::VectorXd& seed) {
  if (seed.size() != v.dim()) {
    throw std::invalid_argument("antiderivative: seed dimension mismatch");
  }
  const double dt = v.grid().dt();
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(v.grid().node_count()));
  out.push_back(seed);
  for (int n = 1; n <= v.grid().steps; ++n) {
    out.push_back(out.back() + 0.5 * dt * (v.at(n - 1) + v.at(n)));
  }
  return Trajectory(v.grid(), std::move(out));
}

Trajectory compose_antiderivatives(const Trajectory& v,
                                   const std::vector<Eigen::VectorXd>& seeds) {
  Trajectory out = v;
  for (auto it = seeds.rbegin(); it != seeds.rend(); ++it) {
    out = antiderivative(out, *it);
  }
  return out;
}

Trajectory fd_time_derivative(const Trajectory& u) {
  const int steps = u.grid().steps;
  if (steps < 2) throw std::invalid_argument("fd_time_derivative: needs N >= 2");
  const double dt = u.grid().dt();
  std::vector<Eigen::VectorXd> out(static_cast<size_t>(u.grid().node_count()));
  out.front() = (-3.0 * u.at(0) + 4.0 * u.at(1) - u.at(2)) / (2.0 * dt);
  for (int n = 1; n < steps; ++n) {
    out[static_cast<size_t>(n)] = (u.at(n + 1) - u.at(n - 1)) / (2.0 * dt);
  }
  out.back() = (3.0 * u.at(steps) - 4.0 * u.at(steps - 1) + u.at(steps - 2)) / (2.0 * dt);
  return Trajectory(u.grid(), std::move(out));
}

double max_node_norm(const Trajectory& u, const Eigen::MatrixXd& gram) {
  double worst = 0.0;
  for (int n = 0; n <= u.grid().steps; ++n) {
    worst = std::max(worst, u.at(n).dot(gram * u.at(n)));
  }
  return std::sqrt(std::max(0.0, worst));
}

double l2_time_norm(const Trajectory& u, const Eigen::MatrixXd& gram) {
  const double dt = u.grid().dt();
  double acc = 0.0;
  for (int n = 0; n <= u.grid().steps; ++n) {
    const double q = u.at(n).dot(gram * u.at(n));
    acc += (n == 0 || n == u.grid().steps) ? 0.5 * q : q;
  }
  return std::sqrt(std::max(0.0, acc * dt));
}

Trajectory trajectory_difference(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid() == b.grid()) || a.dim() != b.dim()) {
    throw std::invalid_argument("trajectory_difference: grid or dimension mismatch");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(a.grid().node_count()));
  for (int n = 0; n <= a.grid().steps; ++n) out.push_back(a.at(n) - b.at(n));
  return Trajectory(a.grid(), std::move(out));
}

}  // namespace hyperbreg
