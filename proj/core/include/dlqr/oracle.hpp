#pragma once

#include <Eigen/Dense>

#include "dlqr/signals.hpp"
#include "dlqr/weierstrass.hpp"

namespace dlqr {

struct OracleResult {
  ControlSignal u;
  double J_star = 0.0;
  /// ||KKT r|| / (||KKT|| ||z|| + ||rhs||)
  double kkt_residual = 0.0;
  /// ||(x_i)_0 + Bt0 u(0)||
  double consistency_residual = 0.0;
};

inline constexpr Eigen::Index kOracleMaxUnknowns = 20000;

/// Minimizes the cost over inputs that are piecewise linear on n_steps
/// uniform intervals, with x1 propagated by the trapezoidal rule, x0 = -Bt0 u
/// eliminated, trapezoidal quadrature, and Bt0 u(0) = -(x_i)_0 imposed as an
/// equality constraint. Throws Error(kTooLarge), Error(kInconsistentInitialData)
/// or Error(kSingularKkt).
OracleResult DirectTranscription(const WeierstrassForm& wf,
                                 const SplitWeights& sw,
                                 const QuadraticWeights& w,
                                 const Eigen::VectorXd& x_i, int n_steps);

}  // namespace dlqr
