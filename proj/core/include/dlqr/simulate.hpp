#pragma once

#include <Eigen/Dense>

#include "dlqr/integrators.hpp"
#include "dlqr/signals.hpp"
#include "dlqr/weierstrass.hpp"

namespace dlqr {

enum class ConsistencyPolicy {
  /// The algebraic part of x_i must match -Bt0 u(0); otherwise
  /// Error(kInconsistentInput).
  kStrict,
  /// Only E x_i (equivalently its X1 part) is prescribed; the algebraic part
  /// at t = 0 is whatever u(0) implies. The mismatch is reported as
  /// Trajectory::initial_admissibility_gap.
  kFromControl,
};

struct SimulationOptions {
  Bdf2Options bdf;
  ConsistencyPolicy policy = ConsistencyPolicy::kStrict;
  double tol_consist = 1e-9;
};

/// x1' = At1 x1 + Bt1 u(t) by BDF2, x0 = -Bt0 u(t) at every node.
/// Throws Error(kInconsistentInput) under kStrict, Error(kNewtonFailure).
Trajectory SimulateOpenLoop(const WeierstrassForm& wf, const ControlSignal& u,
                            const Eigen::VectorXd& x_i, const TimeGrid& grid,
                            const SimulationOptions& opts = {});

/// u = -K(t) x with x = V1 x1 + V0 x0 and x0 = -Bt0 u, i.e.
/// (I - K V0 Bt0) u = -K V1 x1 solved at every evaluation. Throws
/// Error(kSingularClosedLoopCoupling) when that system is singular.
Trajectory SimulateClosedLoop(const WeierstrassForm& wf,
                              const GainSchedule& gains,
                              const Eigen::VectorXd& x_i, const TimeGrid& grid,
                              const SimulationOptions& opts = {});

/// The closed-loop input map u = -Kc(t) x1 in X1 coordinates.
Eigen::MatrixXd CondensedGain(const WeierstrassForm& wf,
                              const Eigen::MatrixXd& K);

/// <x(t_f), G x(t_f)> + int (<x, Q x> + <u, R u>) dt by composite Simpson on
/// the trajectory grid (quadratic fit for a trailing odd interval).
double EvaluateCost(const Trajectory& traj, const QuadraticWeights& w);

/// Composite Simpson of node samples on a possibly nonuniform grid.
double Simpson(const TimeGrid& grid, const std::vector<double>& f);

/// max over nodes of ||x0c + Bt0 u|| / (1 + ||u||).
double ConsistencyResidual(const Trajectory& traj, const WeierstrassForm& wf);

struct RestartDeviation {
  double x1 = 0.0;  ///< sup-norm deviation of the X1 coordinates
  double x0 = 0.0;  ///< and of the X0 coordinates
};

/// Re-runs the closed loop from the trajectory state at t0 (a node of the
/// trajectory grid) over the tail of the grid and compares with the tail.
RestartDeviation OptimalityRestartDeviation(const Trajectory& traj, double t0,
                                            const WeierstrassForm& wf,
                                            const GainSchedule& gains,
                                            const SimulationOptions& opts = {});

}  // namespace dlqr
