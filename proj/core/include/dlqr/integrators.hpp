#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dlqr/time_grid.hpp"

namespace dlqr {

/// y' = f(t, y) with Jacobian df/dy.
struct OdeSystem {
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> rhs;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jacobian;
};

enum class Direction { kForward, kBackward };

struct Bdf2Options {
  /// Equal substeps per output interval.
  int substeps = 4;
  double newton_tol = 1e-12;
  int max_newton_iter = 8;
  /// Contraction rate above which the Jacobian is re-evaluated.
  double slow_rate = 0.3;
};

struct Bdf2Stats {
  long steps = 0;
  long newton_iterations = 0;
  long jacobian_evaluations = 0;
  long factorizations = 0;
};

/// Variable-step BDF2 through every node of `grid` (the first step is an
/// extrapolated implicit Euler pair). KForward starts from y(t0) = y_start,
/// kBackward from y(t_f) = y_start. Returns y at the grid nodes in grid
/// order. Throws Error(kNewtonFailure) if the corrector does not converge with
/// a fresh Jacobian.
std::vector<Eigen::VectorXd> IntegrateBdf2(const OdeSystem& ode,
                                           const TimeGrid& grid,
                                           const Eigen::VectorXd& y_start,
                                           Direction dir,
                                           const Bdf2Options& opts = {},
                                           Bdf2Stats* stats = nullptr);

}  // namespace dlqr
