#pragma once

// Reference solutions coded without the library's Riccati or simulation
// paths, used as oracles by the unit and acceptance tests.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

namespace dlqr::reference {

/// P' = -2P - P^2 + 1, P(0) = 0 in reversed time s: the scalar instance
/// (a = -1, b = 1, q = 1, r = 1), roots -1 +- sqrt(2).
inline double ScalarRiccati(double s) {
  const double r2 = std::sqrt(2.0);
  const double e = std::exp(-2.0 * r2 * s);
  return (1.0 - e) / ((1.0 + r2) + (r2 - 1.0) * e);
}

/// Finite-horizon LQR for x' = A x + B u via the Hamiltonian flow
///   [X; Y](t) = exp(H (t - t_f)) [I; G],  P(t) = Y X^{-1},
/// x*(t) = X(t) X(0)^{-1} x_i.
class HamiltonianLqr {
 public:
  HamiltonianLqr(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                 const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                 const Eigen::MatrixXd& G, double t_f)
      : n_(A.rows()), B_(B), R_(R), G_(G), t_f_(t_f) {
    H_.resize(2 * n_, 2 * n_);
    H_ << A, -B * R.ldlt().solve(B.transpose()), -Q, -A.transpose();
  }

  Eigen::MatrixXd P(double t) const {
    const auto [X, Y] = Flow(t);
    return (X.transpose().partialPivLu().solve(Y.transpose())).transpose();
  }

  Eigen::MatrixXd Gain(double t) const {
    return R_.ldlt().solve(B_.transpose() * P(t));
  }

  Eigen::VectorXd State(double t, const Eigen::VectorXd& x_i) const {
    const auto X0 = Flow(0.0).first;
    return Flow(t).first * X0.partialPivLu().solve(x_i);
  }

  double Cost(const Eigen::VectorXd& x_i) const {
    return x_i.dot(P(0.0) * x_i);
  }

 private:
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> Flow(double t) const {
    Eigen::MatrixXd init(2 * n_, n_);
    init << Eigen::MatrixXd::Identity(n_, n_), G_;
    const Eigen::MatrixXd Ht = H_ * (t - t_f_);
    const Eigen::MatrixXd XY = Ht.exp() * init;
    return {XY.topRows(n_), XY.bottomRows(n_)};
  }

  Eigen::Index n_;
  Eigen::MatrixXd H_, B_, R_, G_;
  double t_f_;
};

}  // namespace dlqr::reference
