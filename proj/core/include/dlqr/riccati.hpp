#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dlqr/descriptor.hpp"
#include "dlqr/hermite.hpp"
#include "dlqr/time_grid.hpp"
#include "dlqr/weierstrass.hpp"

namespace dlqr {

enum class DreMethod {
  kAuto,      ///< explicit unless the problem is stiff on the horizon
  kExplicit,  ///< Dormand-Prince 5(4)
  kImplicit,  ///< L-stable SDIRK 4(3), stage equations solved by Newton
};

struct DreOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  DreMethod method = DreMethod::kAuto;
  /// kAuto switches to the implicit method when rho(At1) * t_f exceeds this.
  double stiffness_threshold = 200.0;
  long max_steps = 1'000'000;
};

struct DreStats {
  DreMethod method = DreMethod::kAuto;
  long accepted = 0;
  long rejected = 0;
  long newton_iterations = 0;
  double stiffness = 0.0;  ///< rho(At1) * (t_f - t0)
};

/// Pi1(t) on a grid containing the requested nodes and every accepted
/// integrator step, with exact right-hand-side slopes for dense output.
/// Pit1(t) = L^T Pi1(t) L with L = E1^{-1} coord_Z1 is formed on demand.
struct RiccatiSolution {
  HermiteSeries Pi1;
  Eigen::MatrixXd lift;  ///< L, rank_1 x n_z; empty until lifted
  Eigen::MatrixXd Pi0;   ///< -A0^{-T} Q0
  Eigen::MatrixXd Pit0;  ///< coord_Z0^T Pi0 coord_X0, n_z x n_x
  DreStats stats;

  const TimeGrid& grid() const { return Pi1.grid(); }
  Eigen::MatrixXd Pit1(double t) const;
  Eigen::MatrixXd Pit1Node(std::size_t k) const;
  Eigen::MatrixXd Pit1Derivative(double t) const;
};

struct AlgebraicSolution {
  Eigen::MatrixXd Pi0, Pit0;
  /// ||A^T Pit0 + Q P_X0|| / max(||Q||, tiny)
  double residual = 0.0;
};

/// Throws Error(kSingularA0) if A0 cannot be factored.
AlgebraicSolution SolveAlgebraicPi0(const DescriptorSystem& sys,
                                    const WeierstrassForm& wf,
                                    const SplitWeights& sw,
                                    const QuadraticWeights& w);

/// Backward integration of
///   dPi1/dt = -Pi1 At1 - At1^T Pi1 + Pi1 Bt1 Rt^{-1} Bt1^T Pi1 - Q1,
///   Pi1(t_f) = G1,
/// symmetrizing every accepted step. Throws Error(kIntegrationFailure) on
/// step-size underflow, step budget exhaustion or blow-up.
RiccatiSolution SolveProjectedDre(const WeierstrassForm& wf,
                                  const SplitWeights& sw, const TimeGrid& grid,
                                  const DreOptions& opts = {});

/// Fills lift (and Pi0/Pit0 from `alg`).
void LiftProjectionFree(RiccatiSolution& rs, const WeierstrassForm& wf,
                        const AlgebraicSolution& alg);

/// The whole Riccati stage: algebraic part, projected DRE and lift.
RiccatiSolution SolveRiccati(const DescriptorSystem& sys,
                             const WeierstrassForm& wf, const SplitWeights& sw,
                             const QuadraticWeights& w, const TimeGrid& grid,
                             const DreOptions& opts = {});

/// Right-hand side of the projected DRE in forward time.
Eigen::MatrixXd DreRhs(const Eigen::MatrixXd& Pi1, const WeierstrassForm& wf,
                       const SplitWeights& sw);

struct DreResidual {
  double max_scaled = 0.0;  ///< over interval midpoints of rs.grid()
  double at_time = 0.0;
};

/// Hermite derivative against the right-hand side at every interval midpoint,
/// each scaled by the sum of the norms of the individual terms.
DreResidual DreMidpointResidual(const RiccatiSolution& rs,
                                const WeierstrassForm& wf,
                                const SplitWeights& sw);

struct ProjectionFreeResidual {
  /// ||Res|| / scale with Res the operator on the left of the projection-free
  /// equation and scale the sum of the norms of its terms.
  double full = 0.0;
  /// ||Res V_m|| / scale, restricted to states x1 + x0 whose algebraic part
  /// is the one realized along optimal trajectories.
  double on_manifold = 0.0;
  double scale = 0.0;
};

/// Throws Error(kOutOfGrid) unless t lies strictly inside the grid.
ProjectionFreeResidual MeasureProjectionFreeResidual(
    const RiccatiSolution& rs, const DescriptorSystem& sys,
    const QuadraticWeights& w, const WeierstrassForm& wf,
    const SplitWeights& sw, double t);

/// Z(t) = Pit1(t) + P_Z1^T Z2(t) P_Z0 + P_Z0^T Z4(t) P_Z0 at every node of
/// rs.grid(); Z2 and Z4 are n_z x n_z. Throws Error(kDimensionMismatch).
std::vector<Eigen::MatrixXd> PerturbGeneralSolution(
    const RiccatiSolution& rs, const SpectralProjectors& proj,
    const std::function<Eigen::MatrixXd(double)>& Z2,
    const std::function<Eigen::MatrixXd(double)>& Z4);

/// <E x_i, Pit1(0) E x_i>.
double MinimumCost(const RiccatiSolution& rs, const DescriptorSystem& sys,
                   const Eigen::VectorXd& x_i);

/// <(x_i)_1, Pi1(0) (x_i)_1> in X1 coordinates.
double MinimumCostProjected(const RiccatiSolution& rs,
                            const WeierstrassForm& wf,
                            const Eigen::VectorXd& x_i);

}  // namespace dlqr
