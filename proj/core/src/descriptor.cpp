#include "dlqr/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dlqr/errors.hpp"
#include "dlqr/linalg.hpp"

namespace dlqr {

DescriptorSystem::DescriptorSystem(Eigen::MatrixXd E, Eigen::MatrixXd A,
                                   Eigen::MatrixXd B)
    : E_(std::move(E)), A_(std::move(A)), B_(std::move(B)) {
  if (E_.rows() != A_.rows() || E_.cols() != A_.cols()) {
    Throw(ErrorCode::kDimensionMismatch, "E and A must have identical shape");
  }
  if (B_.rows() != E_.rows()) {
    Throw(ErrorCode::kDimensionMismatch, "B must have n_z rows");
  }
  if (E_.size() == 0 || B_.cols() == 0) {
    Throw(ErrorCode::kDimensionMismatch, "dimensions must be positive");
  }
  if (!E_.allFinite() || !A_.allFinite() || !B_.allFinite()) {
    Throw(ErrorCode::kDimensionMismatch, "system matrices must be finite");
  }
}

double ProjectorResiduals::max() const {
  return std::max({idempotency, commutation_E, commutation_A});
}

PencilClass ClassifyPencil(const DescriptorSystem& sys,
                           const PencilOptions& opts) {
  if (sys.n_x() != sys.n_z()) {
    Throw(ErrorCode::kNonSquare, "pencil is " + std::to_string(sys.n_z()) +
                                     " x " + std::to_string(sys.n_x()));
  }
  const Eigen::Index n = sys.n_x();
  const Eigen::MatrixXd& E = sys.E();
  const Eigen::MatrixXd& A = sys.A();

  PencilClass out;
  auto& diag = out.condition_report;
  diag.norm_E = linalg::SpectralNorm(E);
  diag.norm_A = linalg::SpectralNorm(A);
  diag.seed = opts.seed;
  diag.rank_threshold = opts.rank_tol * diag.norm_E;

  // Regularity: det(lambda E - A) is a polynomial; one nonsingular probe
  // proves it is not identically zero.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign(0.5);
  const double scale =
      diag.norm_E > 0 ? std::max(diag.norm_A / diag.norm_E, 1e-3) : 1.0;
  bool any_regular = false;
  for (int p = 0; p < opts.n_probes; ++p) {
    const double lambda = (sign(rng) ? 1.0 : -1.0) * mag(rng) * scale;
    const Eigen::MatrixXd pencil = lambda * E - A;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(pencil);
    const double denom = std::abs(lambda) * diag.norm_E + diag.norm_A;
    const double ratio =
        denom > 0 ? svd.singularValues()(n - 1) / denom : 0.0;
    diag.probe_lambdas.push_back(lambda);
    diag.probe_sigma_ratios.push_back(ratio);
    if (ratio > opts.rank_tol) any_regular = true;
  }
  out.regular = any_regular;

  const Eigen::Index rank_E = linalg::NumericalRank(E, diag.rank_threshold);
  if (rank_E == n) {
    diag.coupling_sigma_ratio = 1.0;
    out.index_estimate = 0;
    out.finite_spectrum_count = static_cast<int>(n);
    out.infinite_eigenvalue_count = 0;
    return out;
  }
  // Semi-simple infinite eigenvalues iff A maps ker E onto a complement of
  // range E, i.e. U^T A N is nonsingular.
  const Eigen::MatrixXd N = linalg::NullSpace(E, diag.rank_threshold);
  const Eigen::MatrixXd U = linalg::LeftNullSpace(E, diag.rank_threshold);
  const Eigen::MatrixXd coupling = U.transpose() * A * N;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(coupling);
  const double smin = coupling.size() ? svd.singularValues().minCoeff() : 0.0;
  diag.coupling_sigma_ratio = diag.norm_A > 0 ? smin / diag.norm_A : 0.0;
  if (out.regular && diag.coupling_sigma_ratio > opts.rank_tol) {
    out.index_estimate = 0;
    out.finite_spectrum_count = static_cast<int>(rank_E);
    out.infinite_eigenvalue_count = static_cast<int>(n - rank_E);
  } else {
    out.index_estimate = kHigherIndexSentinel;
    // Higher index moves some of the rank of E into the infinite part; only
    // the total is certain here.
    out.finite_spectrum_count = static_cast<int>(rank_E);
    out.infinite_eigenvalue_count = static_cast<int>(n - rank_E);
  }
  return out;
}

PencilClass ValidatePencil(const DescriptorSystem& sys,
                           const PencilOptions& opts) {
  PencilClass pc = ClassifyPencil(sys, opts);
  if (!pc.regular) {
    Throw(ErrorCode::kSingularPencil,
          "det(lambda E - A) vanishes at all probe values");
  }
  if (pc.index_estimate != 0) {
    Throw(ErrorCode::kHigherIndex,
          "infinite eigenvalues are not semi-simple (nilpotency >= 2); "
          "coupling sigma ratio = " +
              Sci(pc.condition_report.coupling_sigma_ratio));
  }
  return pc;
}

SpectralProjectors MakeProjectors(Eigen::MatrixXd P_X1, Eigen::MatrixXd P_Z1) {
  SpectralProjectors p;
  p.P_X0 = Eigen::MatrixXd::Identity(P_X1.rows(), P_X1.cols()) - P_X1;
  p.P_Z0 = Eigen::MatrixXd::Identity(P_Z1.rows(), P_Z1.cols()) - P_Z1;
  p.rank_1 = static_cast<Eigen::Index>(std::lround(P_X1.trace()));
  p.P_X1 = std::move(P_X1);
  p.P_Z1 = std::move(P_Z1);
  return p;
}

ProjectorResiduals MeasureProjectors(const DescriptorSystem& sys,
                                     const SpectralProjectors& proj) {
  ProjectorResiduals r;
  for (const Eigen::MatrixXd* P :
       {&proj.P_X1, &proj.P_X0, &proj.P_Z1, &proj.P_Z0}) {
    r.idempotency = std::max(r.idempotency, ((*P) * (*P) - *P).norm());
  }
  const double nE = std::max(sys.E().norm(), 1e-300);
  const double nA = std::max(sys.A().norm(), 1e-300);
  r.commutation_E = (proj.P_Z1 * sys.E() - sys.E() * proj.P_X1).norm() / nE;
  r.commutation_A = (proj.P_Z1 * sys.A() - sys.A() * proj.P_X1).norm() / nA;
  return r;
}

SpectralProjectors ComputeProjectors(const DescriptorSystem& sys,
                                     const PencilOptions& opts) {
  const PencilClass pc = ValidatePencil(sys, opts);
  const Eigen::Index n = sys.n_x();
  const Eigen::Index n1 = pc.finite_spectrum_count;
  if (n1 == n) {
    return MakeProjectors(Eigen::MatrixXd::Identity(n, n),
                          Eigen::MatrixXd::Identity(n, n));
  }
  if (n1 == 0) {
    return MakeProjectors(Eigen::MatrixXd::Zero(n, n),
                          Eigen::MatrixXd::Zero(n, n));
  }
  const Eigen::Index n2 = n - n1;
  const auto qz = linalg::OrderedQz(sys.A(), sys.E(), n1);

  // Decouple: [I L; 0 I] (S, T) [I R; 0 I] block diagonal, i.e.
  //   S11 R + L S22 = -S12,  T11 R + L T22 = -T12.
  const auto S11 = qz.S.topLeftCorner(n1, n1);
  const auto S22 = qz.S.bottomRightCorner(n2, n2);
  const auto T11 = qz.T.topLeftCorner(n1, n1);
  const auto T22 = qz.T.bottomRightCorner(n2, n2);
  auto [R, Lneg] = linalg::SolveGeneralizedSylvester(
      S11, S22, -qz.S.topRightCorner(n1, n2), T11, T22,
      -qz.T.topRightCorner(n1, n2));
  const Eigen::MatrixXd L = -Lneg;
  const double coupling_norm = std::max(R.norm(), L.norm());
  if (!std::isfinite(coupling_norm) || coupling_norm > opts.cond_max) {
    Throw(ErrorCode::kProjectionFailure,
          "decoupling transformation norm " + Sci(coupling_norm) +
              " exceeds cond_max");
  }

  const auto Z1 = qz.Z.leftCols(n1);
  const auto Z2 = qz.Z.rightCols(n2);
  const auto Q1 = qz.Q.leftCols(n1);
  const auto Q2 = qz.Q.rightCols(n2);
  Eigen::MatrixXd P_X1 = Z1 * (Z1.transpose() - R * Z2.transpose());
  Eigen::MatrixXd P_Z1 = Q1 * (Q1.transpose() + L * Q2.transpose());
  SpectralProjectors proj = MakeProjectors(std::move(P_X1), std::move(P_Z1));
  proj.rank_1 = n1;

  const ProjectorResiduals res = MeasureProjectors(sys, proj);
  const double growth =
      std::max(1.0, linalg::SpectralNorm(proj.P_X1)) *
      std::max(1.0, linalg::SpectralNorm(proj.P_Z1));
  if (res.max() > opts.tol_proj * growth) {
    Throw(ErrorCode::kProjectionFailure,
          "projector invariants violated: idempotency " +
              Sci(res.idempotency) + ", commutation(E) " +
              Sci(res.commutation_E) + ", commutation(A) " +
              Sci(res.commutation_A));
  }
  return proj;
}

}  // namespace dlqr
