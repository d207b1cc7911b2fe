#pragma once

#include <Eigen/Dense>
#include <complex>

namespace dlqr::linalg {

inline Eigen::MatrixXd Symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Largest singular value; zero for empty matrices.
double SpectralNorm(const Eigen::MatrixXd& m);

/// Number of singular values above `threshold`.
Eigen::Index NumericalRank(const Eigen::MatrixXd& m, double threshold);

/// Orthonormal columns spanning the range of `m`, using `rank` columns of a
/// column-pivoted Householder QR.
Eigen::MatrixXd RangeBasis(const Eigen::MatrixXd& m, Eigen::Index rank);

/// Orthonormal basis of the right null space {x : m x = 0}, singular values
/// below `threshold` counted as zero.
Eigen::MatrixXd NullSpace(const Eigen::MatrixXd& m, double threshold);

/// Orthonormal basis of the left null space {y : y^T m = 0}.
Eigen::MatrixXd LeftNullSpace(const Eigen::MatrixXd& m, double threshold);

/// Real generalized Schur form Q^T A Z = S, Q^T E Z = T of the pencil (A, E)
/// with the `n_leading` eigenvalues of largest |beta|/max(|alpha|,|beta|)
/// (the finite ones, for an index-1 pencil) reordered into the leading block.
struct OrderedGeneralizedSchur {
  Eigen::MatrixXd S, T, Q, Z;
  Eigen::VectorXd alpha_re, alpha_im, beta;
  Eigen::Index n_leading = 0;
};

/// Throws Error(kProjectionFailure) if LAPACK reports failure or the
/// selection cannot be honored (a complex pair straddling the cut).
OrderedGeneralizedSchur OrderedQz(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& E,
                                  Eigen::Index n_leading);

/// Solves the coupled generalized Sylvester system
///   A11 R - L A22 = C,  E11 R - L E22 = F
/// for quasi-triangular (A11, E11), (A22, E22). Returns {R, L}.
/// Throws Error(kProjectionFailure) on LAPACK failure.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> SolveGeneralizedSylvester(
    const Eigen::MatrixXd& A11, const Eigen::MatrixXd& A22,
    const Eigen::MatrixXd& C, const Eigen::MatrixXd& E11,
    const Eigen::MatrixXd& E22, const Eigen::MatrixXd& F);

/// Solves X - c (X M + M^T X) = rhs for many right-hand sides and shifts c
/// with M fixed. A complex Schur factorization of M is computed once; each
/// solve is a triangular Sylvester back-substitution, O(n^3).
class ShiftedLyapunovSolver {
 public:
  explicit ShiftedLyapunovSolver(const Eigen::MatrixXd& M);

  /// Returns X with X - c (X M + M^T X) = rhs. Throws
  /// Error(kIntegrationFailure) if 1 - c (lambda_i + lambda_j) vanishes.
  Eigen::MatrixXd Solve(double c, const Eigen::MatrixXd& rhs) const;

  /// Largest real part among the eigenvalues of M.
  double max_real_eigenvalue() const { return max_real_; }

 private:
  Eigen::MatrixXcd U_;
  Eigen::MatrixXcd T_;
  double max_real_ = 0.0;
};

}  // namespace dlqr::linalg
