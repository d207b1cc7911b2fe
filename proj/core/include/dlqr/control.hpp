#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dlqr/riccati.hpp"
#include "dlqr/signals.hpp"
#include "dlqr/simulate.hpp"
#include "dlqr/weierstrass.hpp"

namespace dlqr {

/// K(t) = R^{-1} B^T (Pit0 + Pit1(t) E) on the Riccati grid, with slopes
/// from the Riccati right-hand side so that interpolation of K agrees with
/// interpolation of Pi1.
GainSchedule FeedbackGain(const RiccatiSolution& rs,
                          const DescriptorSystem& sys,
                          const QuadraticWeights& w);

/// The same formula for arbitrary node values standing in for Pit1 (for
/// instance members of the general solution family).
GainSchedule FeedbackGainFromNodes(const TimeGrid& grid,
                                   const std::vector<Eigen::MatrixXd>& Z,
                                   const Eigen::MatrixXd& Pit0,
                                   const DescriptorSystem& sys,
                                   const QuadraticWeights& w);

struct ConsistencyReport {
  double residual = 0.0;  ///< ||(x_i)_0 + Bt0 u(0)|| in X0 coordinates
  double tol = 0.0;
  bool pass = false;
};

ConsistencyReport CheckAdmissible(const ControlSignal& u,
                                  const Eigen::VectorXd& x_i,
                                  const WeierstrassForm& wf,
                                  double tol_consist = 1e-9);

/// Adjoint lambda' = -At1^T lambda - Q1 x1(t), lambda(t_f) = G1 x1(t_f),
/// integrated backward by BDF2 on the trajectory grid.
std::vector<Eigen::VectorXd> SolveAdjoint(const Trajectory& traj,
                                          const WeierstrassForm& wf,
                                          const SplitWeights& sw,
                                          const Bdf2Options& bdf = {});

/// z_u(t) = 2 [Bt1^T lambda(t) - Bt0^T Q0 x0(t) + R u(t)], the gradient of
/// the cost with respect to u in L2. Throws Error(kGridMismatch) if u and
/// traj are sampled differently.
ControlSignal VariationGradient(const ControlSignal& u, const Trajectory& traj,
                                const WeierstrassForm& wf,
                                const SplitWeights& sw,
                                const QuadraticWeights& w,
                                const Bdf2Options& bdf = {});

struct VariationIdentity {
  double lhs = 0.0;  ///< J(u + h) - J(u)
  double rhs = 0.0;  ///< linear term plus quadratic terms in the response to h
  double gap = 0.0;
};

/// Throws Error(kInadmissibleVariation) unless Bt0 h(0) = 0.
VariationIdentity VariationIdentityCheck(const ControlSignal& u,
                                         const ControlSignal& h,
                                         const Eigen::VectorXd& x_i,
                                         const WeierstrassForm& wf,
                                         const SplitWeights& sw,
                                         const QuadraticWeights& w,
                                         const SimulationOptions& sim = {});

struct PicardOptions {
  int max_iter = 200;
  double tol_fp = 1e-8;
  /// Anderson mixing depth; 0 gives the plain iteration u <- F(u).
  int anderson_depth = 6;
  double tol_consist = 1e-9;
  Bdf2Options bdf;
};

struct PicardResult {
  ControlSignal u;
  int iterations = 0;
  double increment = 0.0;  ///< final ||F(u) - u||_inf
  std::vector<double> history;
};

/// (F u)(t) = -Rt^{-1} Bt1^T lambda(t) with lambda the adjoint along the X1
/// response to u. Evaluated on `grid`.
ControlSignal FixedPointMap(const ControlSignal& u, const Eigen::VectorXd& x_i,
                            const WeierstrassForm& wf, const SplitWeights& sw,
                            const Bdf2Options& bdf = {});

/// Fixed point of F from u = 0. Throws Error(kInconsistentInitialData) if the
/// algebraic part of x_i is not in the range of Bt0, Error(kNoConvergence)
/// after max_iter evaluations of F.
PicardResult PicardSolve(const WeierstrassForm& wf, const SplitWeights& sw,
                         const Eigen::VectorXd& x_i, const TimeGrid& grid,
                         const PicardOptions& opts = {});

}  // namespace dlqr
