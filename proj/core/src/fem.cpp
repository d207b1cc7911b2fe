#include "dlqr/fem.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dlqr/errors.hpp"

namespace dlqr {
namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> EllipticSolver(const FemMatrices& fem,
                                                    double gamma) {
  const Eigen::MatrixXd L = fem.K + gamma * fem.M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = es.eigenvalues().cwiseAbs().minCoeff();
  if (!(lmin > 1e-12 * lmax)) {
    Throw(ErrorCode::kSingularElliptic,
          "K + gamma M is singular for gamma = " + Sci(gamma));
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(L);
}

}  // namespace

FemMatrices AssembleLinearElements(int n_elements) {
  if (n_elements < 1) {
    Throw(ErrorCode::kConfig, "n_elements must be positive");
  }
  const Eigen::Index n = n_elements + 1;
  const double h = 1.0 / n_elements;
  FemMatrices fem;
  fem.M = Eigen::MatrixXd::Zero(n, n);
  fem.K = Eigen::MatrixXd::Zero(n, n);
  fem.load = Eigen::VectorXd::Zero(n);
  fem.nodes = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  for (Eigen::Index e = 0; e < n_elements; ++e) {
    const Eigen::Index a = e, b = e + 1;
    fem.M(a, a) += h / 3;
    fem.M(b, b) += h / 3;
    fem.M(a, b) += h / 6;
    fem.M(b, a) += h / 6;
    fem.K(a, a) += 1 / h;
    fem.K(b, b) += 1 / h;
    fem.K(a, b) -= 1 / h;
    fem.K(b, a) -= 1 / h;
    fem.load(a) += h / 2;
    fem.load(b) += h / 2;
  }
  return fem;
}

FemProblem AssembleParabolicElliptic(const ParabolicEllipticParams& p) {
  if (!(p.t_f > 0.0)) Throw(ErrorCode::kConfig, "t_f must be positive");
  FemMatrices fem = AssembleLinearElements(p.n_elements);
  const auto lu = EllipticSolver(fem, p.gamma);
  const Eigen::Index n = fem.M.rows();
  const Eigen::MatrixXd& M = fem.M;
  const Eigen::MatrixXd& K = fem.K;

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  E.topLeftCorner(n, n) = M;
  Eigen::MatrixXd A(2 * n, 2 * n);
  A << -K - p.rho * M, p.alpha * M, p.beta * M, -K - p.gamma * M;
  Eigen::MatrixXd B(2 * n, 1);
  B << fem.load, fem.load;

  QuadraticWeights w;
  w.Q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  w.Q.topLeftCorner(n, n) = M;
  w.R = Eigen::MatrixXd::Identity(1, 1);
  w.G = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  w.t_f = p.t_f;

  Eigen::VectorXd x_i(2 * n);
  const Eigen::VectorXd w0 = (std::numbers::pi * fem.nodes.array()).sin();
  x_i << w0, lu.solve(p.beta * (M * w0));

  return FemProblem{DescriptorSystem(std::move(E), std::move(A), std::move(B)),
                    std::move(w), std::move(x_i), std::move(fem)};
}

double InstabilityIndicator(const ParabolicEllipticParams& p) {
  const FemMatrices fem = AssembleLinearElements(p.n_elements);
  const auto lu = EllipticSolver(fem, p.gamma);
  const Eigen::MatrixXd& M = fem.M;
  const Eigen::MatrixXd S = -fem.K - p.rho * M + p.alpha * p.beta * M * lu.solve(M);
  // M^{-1} S is similar to the symmetric L^{-1} S L^{-T} with M = L L^T.
  const Eigen::LLT<Eigen::MatrixXd> llt(M);
  const Eigen::MatrixXd Li = llt.matrixL().solve(Eigen::MatrixXd::Identity(M.rows(), M.cols()));
  const Eigen::MatrixXd Ssym = Li * (0.5 * (S + S.transpose())) * Li.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ssym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace dlqr
