#include "dlqr/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dlqr/errors.hpp"

namespace dlqr::linalg {

double SpectralNorm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

Eigen::Index NumericalRank(const Eigen::MatrixXd& m, double threshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return static_cast<Eigen::Index>((s.array() > threshold).count());
}

Eigen::MatrixXd RangeBasis(const Eigen::MatrixXd& m, Eigen::Index rank) {
  if (rank == 0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(m.rows(), rank);
  return q;
}

Eigen::MatrixXd NullSpace(const Eigen::MatrixXd& m, double threshold) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::Index r = (svd.singularValues().array() > threshold).count();
  return svd.matrixV().rightCols(n - r);
}

Eigen::MatrixXd LeftNullSpace(const Eigen::MatrixXd& m, double threshold) {
  return NullSpace(m.transpose(), threshold);
}

OrderedGeneralizedSchur OrderedQz(const Eigen::MatrixXd& A,
                                  const Eigen::MatrixXd& E,
                                  Eigen::Index n_leading) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  OrderedGeneralizedSchur out;
  out.S = A;
  out.T = E;
  out.Q.resize(n, n);
  out.Z.resize(n, n);
  out.alpha_re.resize(n);
  out.alpha_im.resize(n);
  out.beta.resize(n);
  out.n_leading = n_leading;
  if (n == 0) return out;

  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgges(
      LAPACK_COL_MAJOR, 'V', 'V', 'N', nullptr, n, out.S.data(), n,
      out.T.data(), n, &sdim, out.alpha_re.data(), out.alpha_im.data(),
      out.beta.data(), out.Q.data(), n, out.Z.data(), n);
  if (info != 0) {
    Throw(ErrorCode::kProjectionFailure,
          "dgges failed with info = " + std::to_string(info));
  }
  if (n_leading == 0 || n_leading == n) return out;

  // Finiteness score in [0, 1]: 0 for an exactly infinite eigenvalue.
  std::vector<double> score(static_cast<std::size_t>(n));
  for (lapack_int i = 0; i < n; ++i) {
    const double a = std::hypot(out.alpha_re(i), out.alpha_im(i));
    const double b = std::abs(out.beta(i));
    const double d = std::max(a, b);
    score[static_cast<std::size_t>(i)] = d > 0 ? b / d : 0.0;
  }
  std::vector<lapack_int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](lapack_int l, lapack_int r) {
    return score[static_cast<std::size_t>(l)] >
           score[static_cast<std::size_t>(r)];
  });
  std::vector<lapack_logical> select(static_cast<std::size_t>(n), 0);
  for (Eigen::Index k = 0; k < n_leading; ++k) {
    select[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  }
  // Complex conjugate pairs occupy consecutive slots and must move together.
  for (lapack_int i = 0; i + 1 < n; ++i) {
    if (out.alpha_im(i) > 0.0 &&
        select[static_cast<std::size_t>(i)] !=
            select[static_cast<std::size_t>(i + 1)]) {
      Throw(ErrorCode::kProjectionFailure,
            "finite/infinite cut splits a complex conjugate pair");
    }
  }

  lapack_int m = 0;
  double pl = 0.0, pr = 0.0;
  double dif[2] = {0.0, 0.0};
  // Explicit workspace: the LAPACKE size query under-allocates for ijob = 0
  // on some reference builds.
  std::vector<double> work(static_cast<std::size_t>(4 * n + 16 + n * n));
  std::vector<lapack_int> iwork(static_cast<std::size_t>(n + 6));
  info = LAPACKE_dtgsen_work(
      LAPACK_COL_MAJOR, 0, 1, 1, select.data(), n, out.S.data(), n,
      out.T.data(), n, out.alpha_re.data(), out.alpha_im.data(),
      out.beta.data(), out.Q.data(), n, out.Z.data(), n, &m, &pl, &pr, dif,
      work.data(), static_cast<lapack_int>(work.size()), iwork.data(),
      static_cast<lapack_int>(iwork.size()));
  if (info != 0) {
    Throw(ErrorCode::kProjectionFailure,
          "dtgsen eigenvalue reordering failed with info = " +
              std::to_string(info));
  }
  if (m != n_leading) {
    Throw(ErrorCode::kProjectionFailure,
          "reordered leading block has dimension " + std::to_string(m) +
              ", expected " + std::to_string(n_leading));
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> SolveGeneralizedSylvester(
    const Eigen::MatrixXd& A11, const Eigen::MatrixXd& A22,
    const Eigen::MatrixXd& C, const Eigen::MatrixXd& E11,
    const Eigen::MatrixXd& E22, const Eigen::MatrixXd& F) {
  const lapack_int m = static_cast<lapack_int>(A11.rows());
  const lapack_int n = static_cast<lapack_int>(A22.rows());
  Eigen::MatrixXd R = C;
  Eigen::MatrixXd L = F;
  if (m == 0 || n == 0) return {R, L};
  double scale = 1.0;
  double dif = 0.0;
  const lapack_int info = LAPACKE_dtgsyl(
      LAPACK_COL_MAJOR, 'N', 0, m, n, A11.data(), m, A22.data(), n, R.data(),
      m, E11.data(), m, E22.data(), n, L.data(), m, &scale, &dif);
  if (info != 0) {
    Throw(ErrorCode::kProjectionFailure,
          "generalized Sylvester solve failed with info = " +
              std::to_string(info) + " (common eigenvalues?)");
  }
  if (!(scale > 0.0)) {
    Throw(ErrorCode::kProjectionFailure, "generalized Sylvester scale is zero");
  }
  R /= scale;
  L /= scale;
  return {R, L};
}

ShiftedLyapunovSolver::ShiftedLyapunovSolver(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  if (n == 0) return;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(M.cast<std::complex<double>>());
  U_ = schur.matrixU();
  T_ = schur.matrixT();
  max_real_ = T_.diagonal().real().maxCoeff();
}

Eigen::MatrixXd ShiftedLyapunovSolver::Solve(double c,
                                             const Eigen::MatrixXd& rhs) const {
  const Eigen::Index n = rhs.rows();
  if (n == 0) return rhs;
  // With M = U T U^H and Y = U^T X U:  Y - c (Y T + T^T Y) = U^T rhs U.
  Eigen::MatrixXcd Y = U_.transpose() * rhs.cast<std::complex<double>>() * U_;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      std::complex<double> acc = Y(i, j);
      for (Eigen::Index k = 0; k < j; ++k) acc += c * Y(i, k) * T_(k, j);
      for (Eigen::Index k = 0; k < i; ++k) acc += c * T_(k, i) * Y(k, j);
      const std::complex<double> d = 1.0 - c * (T_(i, i) + T_(j, j));
      if (std::abs(d) < 1e-14) {
        Throw(ErrorCode::kIntegrationFailure,
              "shifted Lyapunov operator is singular for this step size");
      }
      Y(i, j) = acc / d;
    }
  }
  Eigen::MatrixXcd X = U_.conjugate() * Y * U_.adjoint();
  return X.real();
}

}  // namespace dlqr::linalg
