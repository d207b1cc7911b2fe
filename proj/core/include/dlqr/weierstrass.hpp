#pragma once

#include <Eigen/Dense>
#include <string>

#include "dlqr/descriptor.hpp"

namespace dlqr {

/// Coordinates splitting the system into the dynamical part on X1 and the
/// algebraic part on X0:
///   d/dt x1 = At1 x1 + Bt1 u,   0 = x0 + Bt0 u.
///
/// basis_* hold column bases of the four subspaces; coord_* are the matching
/// coordinate maps (left inverses that annihilate the complementary
/// subspace), so for example P_X1 = basis_X1 * coord_X1 and
/// x = basis_X1 * (coord_X1 x) + basis_X0 * (coord_X0 x).
struct WeierstrassForm {
  Eigen::MatrixXd basis_X1, basis_X0, basis_Z1, basis_Z0;
  Eigen::MatrixXd coord_X1, coord_X0, coord_Z1, coord_Z0;
  Eigen::MatrixXd E1, A1, A0, B1, B0;
  Eigen::MatrixXd At1, Bt1, Bt0;

  Eigen::Index rank_1() const { return E1.rows(); }
  Eigen::Index rank_0() const { return A0.rows(); }
  Eigen::Index n_x() const { return basis_X1.rows(); }
  Eigen::Index n_u() const { return B1.cols(); }

  /// Ambient state from sub-state coordinates.
  Eigen::VectorXd Lift(const Eigen::VectorXd& x1c,
                       const Eigen::VectorXd& x0c) const {
    return basis_X1 * x1c + basis_X0 * x0c;
  }
};

struct WeierstrassOptions {
  double tol_proj = 1e-8;
  double cond_max = 1e12;
};

/// Restricted operators from spectral projectors, using orthonormal bases of
/// the projector ranges. Throws Error(kAssumptionViolated) naming the clause
/// that fails (E restricted to X0 nonzero, E1 or A0 numerically singular).
WeierstrassForm Decompose(const DescriptorSystem& sys,
                          const SpectralProjectors& proj,
                          const WeierstrassOptions& opts = {});

/// Closed-form decomposition for E = blockdiag(E11, 0) with E11 of size
/// n1 x n1: X1 is the graph x2 = -A22^{-1} A21 x1 and E1 = E11, A0 = A22.
/// No QZ is performed. Throws Error(kAssumptionViolated) if E is not of that
/// shape or E11 is singular, Error(kHigherIndex) if A22 is singular.
WeierstrassForm DecomposeSemiExplicit(const DescriptorSystem& sys,
                                      Eigen::Index n1,
                                      const WeierstrassOptions& opts = {});

/// Size of the leading block if E = blockdiag(E11, 0) exactly; -1 otherwise.
Eigen::Index DetectSemiExplicitBlock(const Eigen::MatrixXd& E);

/// The same decomposition with basis_X1 -> basis_X1 * Tx1 and
/// basis_Z1 -> basis_Z1 * Tz1 (restricted operators change by similarity).
WeierstrassForm ChangeBases(const DescriptorSystem& sys,
                            const WeierstrassForm& wf,
                            const Eigen::MatrixXd& Tx1,
                            const Eigen::MatrixXd& Tz1);

SpectralProjectors ProjectorsOf(const WeierstrassForm& wf);

/// max relative error of lifting the block operators back to E, A, B.
double ReconstructionError(const DescriptorSystem& sys,
                           const WeierstrassForm& wf);

struct QuadraticWeights {
  Eigen::MatrixXd Q, R, G;
  double t_f = 1.0;
};

/// Symmetry to 1e-12 relative, Q and G PSD, R positive definite with
/// lambda_min(R) >= eps_R, t_f > 0. Throws Error(kDimensionMismatch) for
/// shape errors and Error(kAssumptionViolated) otherwise.
void ValidateWeights(const QuadraticWeights& w, Eigen::Index n_x,
                     Eigen::Index n_u, double eps_R = 1e-12);

struct CompatibilityReport {
  double G_X1_X0 = 0.0;  ///< ||P_X1^T G P_X0||
  double G_X0_X1 = 0.0;
  double G_X0_X0 = 0.0;
  double Q_X0_X1 = 0.0;  ///< ||P_X0^T Q P_X1||
  double Q_X1_X0 = 0.0;
  double scale = 0.0;    ///< ||G|| + ||Q||
  double tol = 0.0;
  bool pass = false;

  double worst() const;
  std::string worst_clause() const;
};

/// Final cost vanishing on X0 and no Q cross-coupling between X1 and X0.
CompatibilityReport CheckWeightCompatibility(const QuadraticWeights& w,
                                             const SpectralProjectors& proj,
                                             double tol_weights = 1e-8);

struct SplitWeights {
  Eigen::MatrixXd Q1, Q0, G1;
  /// R + Bt0^T Q0 Bt0: the control weight of the reduced problem on X1.
  Eigen::MatrixXd Rt;
};

/// Throws Error(kIncompatibleWeights) when CheckWeightCompatibility fails.
SplitWeights SplitWeightsFor(const QuadraticWeights& w,
                             const WeierstrassForm& wf,
                             double tol_weights = 1e-8);

}  // namespace dlqr
