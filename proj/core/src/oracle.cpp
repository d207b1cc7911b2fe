#include "dlqr/oracle.hpp"

#include <string>

#include "dlqr/errors.hpp"

namespace dlqr {

OracleResult DirectTranscription(const WeierstrassForm& wf,
                                 const SplitWeights& sw,
                                 const QuadraticWeights& w,
                                 const Eigen::VectorXd& x_i, int n_steps) {
  if (n_steps < 1) Throw(ErrorCode::kConfig, "n_steps must be positive");
  const Eigen::Index r = wf.rank_1();
  const Eigen::Index m = wf.n_u();
  const Eigen::Index N = n_steps;
  const Eigen::Index nU = m * (N + 1);
  if (nU + r * N > kOracleMaxUnknowns) {
    Throw(ErrorCode::kTooLarge,
          std::to_string(nU + r * N) + " unknowns exceed the dense limit of " +
              std::to_string(kOracleMaxUnknowns));
  }
  const double dt = w.t_f / static_cast<double>(N);

  // Equality constraints on u(0), reduced to independent rows.
  const Eigen::VectorXd x0 = wf.coord_X0 * x_i;
  Eigen::MatrixXd C(0, nU);
  Eigen::VectorXd d(0);
  if (wf.rank_0() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        wf.Bt0, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thr = 1e-12 * std::max(1.0, s.size() ? s(0) : 0.0);
    const Eigen::Index rho = (s.array() > thr).count();
    const Eigen::MatrixXd Ur = svd.matrixU().leftCols(rho);
    const double miss = (x0 - Ur * (Ur.transpose() * x0)).norm();
    if (miss > 1e-9 * (1.0 + x_i.norm())) {
      Throw(ErrorCode::kInconsistentInitialData,
            "algebraic part of x_i is outside range(Bt0) by " +
                Sci(miss));
    }
    C = Eigen::MatrixXd::Zero(rho, nU);
    C.leftCols(m) = svd.matrixV().leftCols(rho).transpose();
    d = -(s.head(rho).cwiseInverse().asDiagonal() * (Ur.transpose() * x0));
  }

  // Condensed trapezoidal propagation c_k = F_k c_0 + H_k U.
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lhs(I - 0.5 * dt * wf.At1);
  const Eigen::MatrixXd Ad = lhs.solve(I + 0.5 * dt * wf.At1);
  const Eigen::MatrixXd Bd = lhs.solve(0.5 * dt * wf.Bt1);
  const Eigen::VectorXd c0 = wf.coord_X1 * x_i;

  Eigen::MatrixXd Hq = Eigen::MatrixXd::Zero(nU, nU);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nU);
  double cst = 0.0;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(r, nU);
  Eigen::VectorXd f = c0;
  for (Eigen::Index k = 0; k <= N; ++k) {
    if (k > 0) {
      Eigen::MatrixXd Hn = Ad * H;
      Hn.middleCols((k - 1) * m, m) += Bd;
      Hn.middleCols(k * m, m) += Bd;
      H = std::move(Hn);
      f = Ad * f;
    }
    const double wk = (k == 0 || k == N) ? 0.5 * dt : dt;
    Eigen::MatrixXd Wk = wk * sw.Q1;
    if (k == N) Wk += sw.G1;
    const Eigen::MatrixXd WH = Wk * H;
    Hq.noalias() += H.transpose() * WH;
    g.noalias() += WH.transpose() * f;
    cst += f.dot(Wk * f);
    Hq.block(k * m, k * m, m, m) += wk * sw.Rt;
  }
  Hq = 0.5 * (Hq + Hq.transpose());

  const Eigen::Index nc = C.rows();
  Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(nU + nc, nU + nc);
  KKT.topLeftCorner(nU, nU) = 2.0 * Hq;
  KKT.topRightCorner(nU, nc) = C.transpose();
  KKT.bottomLeftCorner(nc, nU) = C;
  Eigen::VectorXd rhs(nU + nc);
  rhs << -2.0 * g, d;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(KKT);
  const Eigen::VectorXd z = lu.solve(rhs);
  const double denom = KKT.norm() * z.norm() + rhs.norm();
  const double res = denom > 0 ? (KKT * z - rhs).norm() / denom : 0.0;
  if (!z.allFinite() || res > 1e-9) {
    Throw(ErrorCode::kSingularKkt,
          "KKT solve failed (relative residual " + Sci(res) + ")");
  }
  const Eigen::VectorXd U = z.head(nU);

  std::vector<Eigen::VectorXd> u(static_cast<std::size_t>(N + 1));
  for (Eigen::Index k = 0; k <= N; ++k) u[k] = U.segment(k * m, m);
  OracleResult out{
      ControlSignal(TimeGrid::Uniform(0.0, w.t_f, static_cast<std::size_t>(N + 1)),
                    std::move(u)),
      U.dot(Hq * U) + 2.0 * g.dot(U) + cst, res,
      (x0 + wf.Bt0 * U.head(m)).norm()};
  return out;
}

}  // namespace dlqr
