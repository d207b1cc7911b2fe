#include "dlqr/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlqr/errors.hpp"
#include "dlqr/linalg.hpp"

namespace dlqr {
namespace {

double ConditionNumber(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0 ? s(0) / smin : INFINITY;
}

void CheckInvertible(const Eigen::MatrixXd& m, const char* name,
                     double cond_max, ErrorCode code) {
  const double c = ConditionNumber(m);
  if (!(c <= cond_max)) {
    Throw(code, std::string(name) + " is numerically singular (cond = " +
                    Sci(c) + ")");
  }
}

// Restricted operators from bases and coordinate maps already in wf.
void FillBlocks(const DescriptorSystem& sys, WeierstrassForm& wf,
                const WeierstrassOptions& opts) {
  wf.E1 = wf.coord_Z1 * sys.E() * wf.basis_X1;
  wf.A1 = wf.coord_Z1 * sys.A() * wf.basis_X1;
  wf.A0 = wf.coord_Z0 * sys.A() * wf.basis_X0;
  wf.B1 = wf.coord_Z1 * sys.B();
  wf.B0 = wf.coord_Z0 * sys.B();

  const double nE = std::max(linalg::SpectralNorm(sys.E()), 1e-300);
  const double e0 = linalg::SpectralNorm(sys.E() * wf.basis_X0) /
                    std::max(1.0, linalg::SpectralNorm(wf.basis_X0));
  if (e0 > opts.tol_proj * nE) {
    Throw(ErrorCode::kAssumptionViolated,
          "E restricted to X0 is not zero (||E V0|| / ||E|| = " +
              Sci(e0 / nE) + ")");
  }
  CheckInvertible(wf.E1, "E1", opts.cond_max, ErrorCode::kAssumptionViolated);
  CheckInvertible(wf.A0, "A0", opts.cond_max, ErrorCode::kAssumptionViolated);

  if (wf.E1.size()) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(wf.E1);
    wf.At1 = lu.solve(wf.A1);
    wf.Bt1 = lu.solve(wf.B1);
  } else {
    wf.At1.resize(0, 0);
    wf.Bt1.resize(0, sys.n_u());
  }
  if (wf.A0.size()) {
    wf.Bt0 = wf.A0.partialPivLu().solve(wf.B0);
  } else {
    wf.Bt0.resize(0, sys.n_u());
  }
}

}  // namespace

WeierstrassForm Decompose(const DescriptorSystem& sys,
                          const SpectralProjectors& proj,
                          const WeierstrassOptions& opts) {
  const Eigen::Index n = sys.n_x();
  if (proj.P_X1.rows() != n || proj.P_Z1.rows() != sys.n_z()) {
    Throw(ErrorCode::kDimensionMismatch, "projectors do not match the system");
  }
  const Eigen::Index r = proj.rank_1;
  WeierstrassForm wf;
  wf.basis_X1 = linalg::RangeBasis(proj.P_X1, r);
  wf.basis_X0 = linalg::RangeBasis(proj.P_X0, n - r);
  wf.basis_Z1 = linalg::RangeBasis(proj.P_Z1, r);
  wf.basis_Z0 = linalg::RangeBasis(proj.P_Z0, n - r);
  // With orthonormal V spanning range(P), V^T P is the coordinate map of P.
  wf.coord_X1 = wf.basis_X1.transpose() * proj.P_X1;
  wf.coord_X0 = wf.basis_X0.transpose() * proj.P_X0;
  wf.coord_Z1 = wf.basis_Z1.transpose() * proj.P_Z1;
  wf.coord_Z0 = wf.basis_Z0.transpose() * proj.P_Z0;
  FillBlocks(sys, wf, opts);
  return wf;
}

Eigen::Index DetectSemiExplicitBlock(const Eigen::MatrixXd& E) {
  if (E.rows() != E.cols()) return -1;
  const Eigen::Index n = E.rows();
  Eigen::Index n1 = n;
  while (n1 > 0 && E.row(n1 - 1).isZero(0.0) && E.col(n1 - 1).isZero(0.0)) {
    --n1;
  }
  return n1;
}

WeierstrassForm DecomposeSemiExplicit(const DescriptorSystem& sys,
                                      Eigen::Index n1,
                                      const WeierstrassOptions& opts) {
  const Eigen::Index n = sys.n_x();
  if (sys.n_z() != n) {
    Throw(ErrorCode::kNonSquare, "semi-explicit form needs a square pencil");
  }
  if (n1 < 0 || n1 > n) {
    Throw(ErrorCode::kDimensionMismatch, "leading block size out of range");
  }
  const Eigen::Index n2 = n - n1;
  const Eigen::MatrixXd& E = sys.E();
  const Eigen::MatrixXd& A = sys.A();
  const double nE = std::max(linalg::SpectralNorm(E), 1e-300);
  const double off = std::max({E.topRightCorner(n1, n2).norm(),
                               E.bottomLeftCorner(n2, n1).norm(),
                               E.bottomRightCorner(n2, n2).norm()});
  if (off > opts.tol_proj * nE) {
    Throw(ErrorCode::kAssumptionViolated,
          "E is not of the form blockdiag(E11, 0) with a " +
              std::to_string(n1) + " x " + std::to_string(n1) +
              " leading block");
  }
  const Eigen::MatrixXd A21 = A.bottomLeftCorner(n2, n1);
  const Eigen::MatrixXd A12 = A.topRightCorner(n1, n2);
  const Eigen::MatrixXd A22 = A.bottomRightCorner(n2, n2);
  CheckInvertible(A22, "A22", opts.cond_max, ErrorCode::kHigherIndex);

  Eigen::MatrixXd S(n2, n1);      // A22^{-1} A21
  Eigen::MatrixXd Tt(n1, n2);     // A12 A22^{-1}
  if (n2 > 0) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A22);
    S = lu.solve(A21);
    const Eigen::MatrixXd Tt_T = lu.transpose().solve(A12.transpose());
    Tt = Tt_T.transpose();
  }
  const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(n1, n1);
  const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(n2, n2);

  WeierstrassForm wf;
  wf.basis_X1.resize(n, n1);
  wf.basis_X1 << I1, -S;
  wf.coord_X1 = Eigen::MatrixXd::Zero(n1, n);
  wf.coord_X1.leftCols(n1) = I1;
  wf.basis_X0 = Eigen::MatrixXd::Zero(n, n2);
  wf.basis_X0.bottomRows(n2) = I2;
  wf.coord_X0.resize(n2, n);
  wf.coord_X0 << S, I2;

  wf.basis_Z1 = Eigen::MatrixXd::Zero(n, n1);
  wf.basis_Z1.topRows(n1) = I1;
  wf.coord_Z1.resize(n1, n);
  wf.coord_Z1 << I1, -Tt;
  wf.basis_Z0.resize(n, n2);
  wf.basis_Z0 << Tt, I2;
  wf.coord_Z0 = Eigen::MatrixXd::Zero(n2, n);
  wf.coord_Z0.rightCols(n2) = I2;

  FillBlocks(sys, wf, opts);
  // Exact blocks where the generic products would only add rounding.
  wf.E1 = E.topLeftCorner(n1, n1);
  wf.A0 = A22;
  if (n1 > 0) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(wf.E1);
    wf.At1 = lu.solve(wf.A1);
    wf.Bt1 = lu.solve(wf.B1);
  }
  return wf;
}

WeierstrassForm ChangeBases(const DescriptorSystem& sys,
                            const WeierstrassForm& wf,
                            const Eigen::MatrixXd& Tx1,
                            const Eigen::MatrixXd& Tz1) {
  const Eigen::Index r = wf.rank_1();
  if (Tx1.rows() != r || Tx1.cols() != r || Tz1.rows() != r ||
      Tz1.cols() != r) {
    Throw(ErrorCode::kDimensionMismatch, "basis changes must be rank_1 square");
  }
  WeierstrassForm out = wf;
  out.basis_X1 = wf.basis_X1 * Tx1;
  out.basis_Z1 = wf.basis_Z1 * Tz1;
  out.coord_X1 = Tx1.partialPivLu().solve(wf.coord_X1);
  out.coord_Z1 = Tz1.partialPivLu().solve(wf.coord_Z1);
  WeierstrassOptions loose;
  loose.cond_max = INFINITY;
  loose.tol_proj = INFINITY;
  FillBlocks(sys, out, loose);
  return out;
}

SpectralProjectors ProjectorsOf(const WeierstrassForm& wf) {
  SpectralProjectors p = MakeProjectors(wf.basis_X1 * wf.coord_X1,
                                        wf.basis_Z1 * wf.coord_Z1);
  p.rank_1 = wf.rank_1();
  return p;
}

double ReconstructionError(const DescriptorSystem& sys,
                           const WeierstrassForm& wf) {
  // E = W1 E1 Cx1,  A = W1 A1 Cx1 + W0 A0 Cx0,  B = W1 B1 + W0 B0.
  const Eigen::MatrixXd E = wf.basis_Z1 * wf.E1 * wf.coord_X1;
  const Eigen::MatrixXd A = wf.basis_Z1 * wf.A1 * wf.coord_X1 +
                            wf.basis_Z0 * wf.A0 * wf.coord_X0;
  const Eigen::MatrixXd B = wf.basis_Z1 * wf.B1 + wf.basis_Z0 * wf.B0;
  auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm() / std::max(b.norm(), 1e-300);
  };
  return std::max({rel(E, sys.E()), rel(A, sys.A()), rel(B, sys.B())});
}

void ValidateWeights(const QuadraticWeights& w, Eigen::Index n_x,
                     Eigen::Index n_u, double eps_R) {
  auto square = [](const Eigen::MatrixXd& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n) {
      Throw(ErrorCode::kDimensionMismatch,
            std::string(name) + " must be " + std::to_string(n) + " x " +
                std::to_string(n));
    }
    if (!m.allFinite()) {
      Throw(ErrorCode::kDimensionMismatch,
            std::string(name) + " has non-finite entries");
    }
  };
  square(w.Q, n_x, "Q");
  square(w.G, n_x, "G");
  square(w.R, n_u, "R");
  if (!(w.t_f > 0.0) || !std::isfinite(w.t_f)) {
    Throw(ErrorCode::kAssumptionViolated, "t_f must be positive");
  }
  auto symmetric_min_eig = [](const Eigen::MatrixXd& m, const char* name) {
    const double scale = std::max(m.norm(), 1e-300);
    if ((m - m.transpose()).norm() > 1e-12 * scale) {
      Throw(ErrorCode::kAssumptionViolated,
            std::string(name) + " is not symmetric");
    }
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  const double qmin = symmetric_min_eig(w.Q, "Q");
  const double gmin = symmetric_min_eig(w.G, "G");
  const double rmin = symmetric_min_eig(w.R, "R");
  if (qmin < -1e-12 * std::max(1.0, w.Q.norm())) {
    Throw(ErrorCode::kAssumptionViolated, "Q is not positive semidefinite");
  }
  if (gmin < -1e-12 * std::max(1.0, w.G.norm())) {
    Throw(ErrorCode::kAssumptionViolated, "G is not positive semidefinite");
  }
  if (!(rmin >= eps_R)) {
    Throw(ErrorCode::kAssumptionViolated,
          "R is not coercive (lambda_min = " + Sci(rmin) + ")");
  }
}

double CompatibilityReport::worst() const {
  return std::max({G_X1_X0, G_X0_X1, G_X0_X0, Q_X0_X1, Q_X1_X0});
}

std::string CompatibilityReport::worst_clause() const {
  const std::pair<double, const char*> items[] = {
      {G_X1_X0, "G couples X1 and X0"},
      {G_X0_X1, "G couples X0 and X1"},
      {G_X0_X0, "G does not vanish on X0"},
      {Q_X0_X1, "Q couples X0 and X1"},
      {Q_X1_X0, "Q couples X1 and X0"}};
  const auto* best = std::max_element(
      std::begin(items), std::end(items),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  return best->second;
}

CompatibilityReport CheckWeightCompatibility(const QuadraticWeights& w,
                                             const SpectralProjectors& proj,
                                             double tol_weights) {
  const Eigen::MatrixXd& P1 = proj.P_X1;
  const Eigen::MatrixXd& P0 = proj.P_X0;
  CompatibilityReport rep;
  rep.G_X1_X0 = linalg::SpectralNorm(P1.transpose() * w.G * P0);
  rep.G_X0_X1 = linalg::SpectralNorm(P0.transpose() * w.G * P1);
  rep.G_X0_X0 = linalg::SpectralNorm(P0.transpose() * w.G * P0);
  rep.Q_X0_X1 = linalg::SpectralNorm(P0.transpose() * w.Q * P1);
  rep.Q_X1_X0 = linalg::SpectralNorm(P1.transpose() * w.Q * P0);
  rep.scale = linalg::SpectralNorm(w.G) + linalg::SpectralNorm(w.Q);
  rep.tol = tol_weights * rep.scale;
  rep.pass = rep.worst() <= rep.tol;
  return rep;
}

SplitWeights SplitWeightsFor(const QuadraticWeights& w,
                             const WeierstrassForm& wf, double tol_weights) {
  const CompatibilityReport rep =
      CheckWeightCompatibility(w, ProjectorsOf(wf), tol_weights);
  if (!rep.pass) {
    Throw(ErrorCode::kIncompatibleWeights,
          rep.worst_clause() + " (residual " + Sci(rep.worst()) +
              " > " + Sci(rep.tol) + ")");
  }
  SplitWeights sw;
  sw.Q1 = linalg::Symmetrize(wf.basis_X1.transpose() * w.Q * wf.basis_X1);
  sw.Q0 = linalg::Symmetrize(wf.basis_X0.transpose() * w.Q * wf.basis_X0);
  sw.G1 = linalg::Symmetrize(wf.basis_X1.transpose() * w.G * wf.basis_X1);
  sw.Rt = linalg::Symmetrize(w.R + wf.Bt0.transpose() * sw.Q0 * wf.Bt0);
  return sw;
}

}  // namespace dlqr
