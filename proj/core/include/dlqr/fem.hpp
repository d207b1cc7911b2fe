#pragma once

#include <Eigen/Dense>

#include "dlqr/descriptor.hpp"
#include "dlqr/weierstrass.hpp"

namespace dlqr {

/// w_t = w_xx - rho w + alpha v + u,  0 = v_xx - gamma v + beta w + u on
/// (0, 1) with homogeneous Neumann conditions, discretized by linear
/// elements on a uniform mesh.
struct ParabolicEllipticParams {
  double rho = 1.0;
  double gamma = 2.0;
  double alpha = 2.0;
  double beta = 2.0;
  int n_elements = 27;
  double t_f = 6.0;
};

struct FemMatrices {
  Eigen::MatrixXd M;  ///< mass
  Eigen::MatrixXd K;  ///< stiffness
  Eigen::VectorXd load;  ///< integrals of the hat functions
  Eigen::VectorXd nodes;
};

/// Throws Error(kConfig) for n_elements < 1.
FemMatrices AssembleLinearElements(int n_elements);

struct FemProblem {
  DescriptorSystem sys;
  QuadraticWeights weights;
  Eigen::VectorXd x_i;
  FemMatrices fem;
};

/// State ordering [w nodes; v nodes]. E = blockdiag(M, 0),
/// A = [[-K - rho M, alpha M], [beta M, -K - gamma M]], B = [load; load],
/// Q = blockdiag(M, 0), R = 1, G = 0, w(x, 0) = sin(pi x) and v(x, 0) from
/// (K + gamma M) v = beta M w. Throws Error(kSingularElliptic) if K + gamma M
/// is singular.
FemProblem AssembleParabolicElliptic(const ParabolicEllipticParams& p);

/// Largest real part among the eigenvalues of the uncontrolled reduced
/// operator M^{-1}(-K - rho M + alpha beta M (K + gamma M)^{-1} M).
double InstabilityIndicator(const ParabolicEllipticParams& p);

}  // namespace dlqr
