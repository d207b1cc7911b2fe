#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dlqr/dlqr.hpp"

namespace dlqr {
namespace {

DescriptorSystem Diag2(double a1, double a2) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2, 2), A = Eigen::MatrixXd::Zero(2, 2);
  E(0, 0) = 1.0;
  A(0, 0) = a1;
  A(1, 1) = a2;
  Eigen::MatrixXd B(2, 1);
  B << 1, 1;
  return DescriptorSystem(E, A, B);
}

Eigen::MatrixXd RandomStable(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  A -= (es.eigenvalues().real().maxCoeff() + 0.5) *
       Eigen::MatrixXd::Identity(n, n);
  return A;
}

// A semi-explicit system hidden behind random invertible row/column mixing.
DescriptorSystem MixedSemiExplicit(std::uint64_t seed, Eigen::MatrixXd* S,
                                   Eigen::MatrixXd* T) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto rnd = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
    return m;
  };
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(5, 5);
  E.topLeftCorner(3, 3) = Eigen::MatrixXd::Identity(3, 3) + 0.2 * rnd(3, 3);
  Eigen::MatrixXd A = rnd(5, 5);
  A.bottomRightCorner(2, 2) += 3.0 * Eigen::MatrixXd::Identity(2, 2);
  *S = Eigen::MatrixXd::Identity(5, 5) + 0.3 * rnd(5, 5);
  *T = Eigen::MatrixXd::Identity(5, 5) + 0.3 * rnd(5, 5);
  return DescriptorSystem(*S * E * *T, *S * A * *T, *S * rnd(5, 2));
}

// ---- time grid, interpolation, quadrature -------------------------------

TEST(TimeGrid, RejectsNonIncreasingNodes) {
  EXPECT_THROW(TimeGrid({0.0, 1.0, 1.0}), Error);
  EXPECT_THROW(TimeGrid({0.0}), Error);
}

TEST(TimeGrid, LocateAndTail) {
  const TimeGrid g = TimeGrid::Uniform(0.0, 1.0, 11);
  EXPECT_EQ(g.Locate(0.0), 0u);
  EXPECT_EQ(g.Locate(0.55), 5u);
  EXPECT_EQ(g.Locate(1.0), 9u);
  EXPECT_THROW(g.Locate(1.5), Error);
  const TimeGrid tail = g.Tail(0.5);
  EXPECT_EQ(tail.size(), 6u);
  EXPECT_DOUBLE_EQ(tail.t0(), 0.5);
  EXPECT_TRUE(g.IndexOf(0.3, 1e-9).has_value());
  EXPECT_FALSE(g.IndexOf(0.35, 1e-9).has_value());
}

TEST(Hermite, ExactForCubics) {
  const TimeGrid g({0.0, 0.3, 0.5, 1.2, 2.0});
  auto f = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t * t; };
  auto df = [](double t) { return -2.0 + 1.5 * t * t; };
  std::vector<Eigen::MatrixXd> v, d;
  for (double t : g.nodes()) {
    v.push_back(Eigen::MatrixXd::Constant(1, 1, f(t)));
    d.push_back(Eigen::MatrixXd::Constant(1, 1, df(t)));
  }
  const HermiteSeries h(g, v, d);
  for (double t : {0.1, 0.41, 0.9, 1.7}) {
    EXPECT_NEAR(h.Evaluate(t)(0, 0), f(t), 1e-13);
    EXPECT_NEAR(h.Derivative(t)(0, 0), df(t), 1e-12);
  }
}

TEST(Simpson, ExactForQuadraticsOnNonuniformGrids) {
  const TimeGrid even({0.0, 0.2, 0.5, 0.6, 1.0});
  const TimeGrid odd({0.0, 0.2, 0.5, 0.6, 1.0, 1.3});
  auto f = [](double t) { return 3.0 * t * t - t + 2.0; };
  auto F = [](double t) { return t * t * t - 0.5 * t * t + 2.0 * t; };
  for (const TimeGrid* g : {&even, &odd}) {
    std::vector<double> s;
    for (double t : g->nodes()) s.push_back(f(t));
    EXPECT_NEAR(Simpson(*g, s), F(g->tf()) - F(g->t0()), 1e-13);
  }
}

TEST(Simpson, ConstantStateAndInputCost) {
  const TimeGrid g = TimeGrid::Uniform(0.0, 1.0, 7);
  Trajectory traj{g, {}, {}, {}, {}};
  for (std::size_t k = 0; k < g.size(); ++k) {
    traj.x.push_back(Eigen::VectorXd::Constant(1, 2.0));
    traj.u.push_back(Eigen::VectorXd::Constant(1, 3.0));
  }
  QuadraticWeights w{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                     Eigen::MatrixXd::Zero(1, 1), 1.0};
  EXPECT_NEAR(EvaluateCost(traj, w), 13.0, 1e-14);
}

// ---- BDF2 ---------------------------------------------------------------

double Bdf2Error(std::size_t nodes, int substeps, Direction dir) {
  OdeSystem ode;
  ode.rhs = [](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return -2.0 * y + Eigen::VectorXd::Constant(1, std::cos(t));
  };
  ode.jacobian = [](double, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Constant(1, 1, -2.0);
  };
  auto exact = [](double t) {
    return (2.0 * std::cos(t) + std::sin(t)) / 5.0 + 0.6 * std::exp(-2.0 * t);
  };
  const TimeGrid g = TimeGrid::Uniform(0.0, 2.0, nodes);
  Bdf2Options o;
  o.substeps = substeps;
  const double start = dir == Direction::kForward ? exact(0.0) : exact(2.0);
  const auto y = IntegrateBdf2(ode, g, Eigen::VectorXd::Constant(1, start), dir, o);
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    err = std::max(err, std::abs(y[k](0) - exact(g[k])));
  }
  return err;
}

TEST(Bdf2, SecondOrderBothDirections) {
  for (Direction d : {Direction::kForward, Direction::kBackward}) {
    const double e1 = Bdf2Error(41, 2, d);
    const double e2 = Bdf2Error(81, 2, d);
    EXPECT_GT(e1 / e2, 3.5);
    EXPECT_LT(e1 / e2, 4.5);
    EXPECT_LT(e2, 1e-4);
  }
}

// ---- pencil admission and projectors ------------------------------------

TEST(Pencil, InvertibleEIsIndexZeroWithNoInfiniteEigenvalues) {
  const DescriptorSystem sys(Eigen::MatrixXd::Identity(4, 4),
                             RandomStable(4, 3), Eigen::MatrixXd::Ones(4, 1));
  const PencilClass pc = ValidatePencil(sys);
  EXPECT_TRUE(pc.regular);
  EXPECT_EQ(pc.index_estimate, 0);
  EXPECT_EQ(pc.infinite_eigenvalue_count, 0);
  EXPECT_EQ(pc.finite_spectrum_count, 4);
}

TEST(Pencil, DecoupledConstraintHasOneInfiniteEigenvalue) {
  const PencilClass pc = ValidatePencil(Diag2(-1.0, -1.0));
  EXPECT_TRUE(pc.regular);
  EXPECT_EQ(pc.index_estimate, 0);
  EXPECT_EQ(pc.infinite_eigenvalue_count, 1);
}

TEST(Pencil, NilpotentBlockIsHigherIndex) {
  Eigen::MatrixXd E(2, 2);
  E << 0, 1, 0, 0;
  const DescriptorSystem sys(E, Eigen::MatrixXd::Identity(2, 2),
                             Eigen::MatrixXd::Ones(2, 1));
  EXPECT_EQ(ClassifyPencil(sys).index_estimate, kHigherIndexSentinel);
  try {
    ValidatePencil(sys);
    FAIL() << "nilpotent pencil admitted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHigherIndex);
  }
}

TEST(Pencil, SingularAndNonSquarePencilsRejected) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2, 2), A = Eigen::MatrixXd::Zero(2, 2);
  E(0, 0) = 1.0;
  A(0, 0) = -1.0;
  try {
    ValidatePencil(DescriptorSystem(E, A, Eigen::MatrixXd::Ones(2, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularPencil);
  }
  const DescriptorSystem rect(Eigen::MatrixXd::Ones(2, 3),
                              Eigen::MatrixXd::Ones(2, 3),
                              Eigen::MatrixXd::Ones(2, 1));
  try {
    ValidatePencil(rect);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonSquare);
  }
}

TEST(Projectors, IdentityEGivesTrivialSplit) {
  const DescriptorSystem sys(Eigen::MatrixXd::Identity(4, 4),
                             RandomStable(4, 5), Eigen::MatrixXd::Ones(4, 2));
  const SpectralProjectors p = ComputeProjectors(sys);
  EXPECT_EQ(p.rank_1, 4);
  EXPECT_LT((p.P_X1 - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT(p.P_X0.norm(), 1e-12);
}

TEST(Projectors, DiagonalPencilIsAlreadySplit) {
  const SpectralProjectors p = ComputeProjectors(Diag2(-1.0, -1.0));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  EXPECT_LT((p.P_X1 - D).norm(), 1e-12);
  EXPECT_LT((p.P_Z1 - D).norm(), 1e-12);
}

TEST(Projectors, InvariantsOnMixedSystemsAndUnderScaling) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Eigen::MatrixXd S, T;
    const DescriptorSystem sys = MixedSemiExplicit(seed, &S, &T);
    const SpectralProjectors p = ComputeProjectors(sys);
    EXPECT_EQ(p.rank_1, 3);
    EXPECT_LT(MeasureProjectors(sys, p).max(), 1e-8);
    // X0 = T^{-1} span{e4, e5}: the kernel of E.
    EXPECT_LT((sys.E() * p.P_X0).norm(), 1e-10 * sys.E().norm());
    const DescriptorSystem scaled(3.7 * sys.E(), 3.7 * sys.A(), sys.B());
    const SpectralProjectors ps = ComputeProjectors(scaled);
    EXPECT_LT((ps.P_X1 - p.P_X1).norm(), 1e-8 * p.P_X1.norm());
    EXPECT_LT((ps.P_Z1 - p.P_Z1).norm(), 1e-8 * p.P_Z1.norm());
  }
}

TEST(Projectors, FemSystemCommutesWithEAndA) {
  ParabolicEllipticParams pp;
  pp.n_elements = 10;
  const FemProblem fp = AssembleParabolicElliptic(pp);
  const SpectralProjectors p = ComputeProjectors(fp.sys);
  EXPECT_EQ(p.rank_1, 11);
  const ProjectorResiduals r = MeasureProjectors(fp.sys, p);
  EXPECT_LE(r.commutation_E, 1e-10);
  EXPECT_LE(r.commutation_A, 1e-10);
  EXPECT_LE(r.idempotency, 1e-10);
}

// ---- Weierstrass form ---------------------------------------------------

TEST(Weierstrass, IdentityEHasNoAlgebraicPart) {
  const Eigen::MatrixXd A = RandomStable(3, 9);
  const Eigen::MatrixXd B = Eigen::MatrixXd::Ones(3, 1);
  const DescriptorSystem sys(Eigen::MatrixXd::Identity(3, 3), A, B);
  const WeierstrassForm wf = Decompose(sys, ComputeProjectors(sys));
  EXPECT_EQ(wf.rank_0(), 0);
  EXPECT_EQ(wf.Bt0.rows(), 0);
  EXPECT_LT(ReconstructionError(sys, wf), 1e-12);
  // Restricted operators are similar to (I, A, B).
  const Eigen::MatrixXd At = wf.basis_X1 * wf.At1 * wf.coord_X1;
  EXPECT_LT((At - A).norm(), 1e-12 * A.norm());
}

TEST(Weierstrass, ScalarBlocks) {
  const DescriptorSystem sys = Diag2(-1.0, -2.0);
  const WeierstrassForm wf = Decompose(sys, ComputeProjectors(sys));
  ASSERT_EQ(wf.rank_1(), 1);
  ASSERT_EQ(wf.rank_0(), 1);
  EXPECT_NEAR(wf.At1(0, 0), -1.0, 1e-14);
  // Bt1 and Bt0 depend on the sign of the chosen basis vectors; the maps
  // back to the ambient space do not.
  EXPECT_NEAR((wf.basis_X1 * wf.Bt1)(0, 0), 1.0, 1e-14);
  EXPECT_NEAR((wf.basis_X0 * wf.Bt0)(1, 0), -0.5, 1e-14);
}

TEST(Weierstrass, FemBlocksAreMassAndShiftedStiffness) {
  ParabolicEllipticParams pp;
  pp.n_elements = 6;
  const FemProblem fp = AssembleParabolicElliptic(pp);
  const WeierstrassForm wf = DecomposeSemiExplicit(fp.sys, 7);
  EXPECT_LT((wf.E1 - fp.fem.M).norm(), 1e-14);
  EXPECT_LT((wf.A0 + fp.fem.K + pp.gamma * fp.fem.M).norm(), 1e-13);
  EXPECT_LT(ReconstructionError(fp.sys, wf), 1e-12);
}

TEST(Weierstrass, SemiExplicitAndQzRoutesAgree) {
  ParabolicEllipticParams pp;
  pp.n_elements = 5;
  const FemProblem fp = AssembleParabolicElliptic(pp);
  const SpectralProjectors qz = ComputeProjectors(fp.sys);
  const SpectralProjectors se = ProjectorsOf(DecomposeSemiExplicit(fp.sys, 6));
  EXPECT_LT((qz.P_X1 - se.P_X1).norm(), 1e-10);
  EXPECT_LT((qz.P_Z1 - se.P_Z1).norm(), 1e-10);
}

TEST(Weierstrass, MixedSystemsReconstruct) {
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    Eigen::MatrixXd S, T;
    const DescriptorSystem sys = MixedSemiExplicit(seed, &S, &T);
    const WeierstrassForm wf = Decompose(sys, ComputeProjectors(sys));
    EXPECT_LT(ReconstructionError(sys, wf), 1e-8);
    EXPECT_LT((sys.E() * wf.basis_X0).norm(), 1e-8 * sys.E().norm());
  }
}

TEST(Weierstrass, SemiExplicitRejectsSingularAlgebraicBlock) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(3, 3), A = Eigen::MatrixXd::Zero(3, 3);
  E(0, 0) = 1.0;
  A(0, 0) = -1.0;
  A(1, 2) = 1.0;
  A(2, 1) = 1.0;
  A(1, 1) = 1.0;
  A(2, 2) = 1.0;
  const DescriptorSystem sys(E, A, Eigen::MatrixXd::Ones(3, 1));
  EXPECT_EQ(DetectSemiExplicitBlock(E), 1);
  try {
    DecomposeSemiExplicit(sys, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHigherIndex);
  }
}

// ---- weights -------------------------------------------------------------

TEST(Weights, ZeroFinalCostAndBlockQPass) {
  const DescriptorSystem sys = Diag2(-1.0, -2.0);
  const SpectralProjectors p = ComputeProjectors(sys);
  QuadraticWeights w{Eigen::MatrixXd::Identity(2, 2),
                     Eigen::MatrixXd::Identity(1, 1),
                     Eigen::MatrixXd::Zero(2, 2), 1.0};
  const CompatibilityReport r = CheckWeightCompatibility(w, p);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.worst(), 0.0);
}

TEST(Weights, AllOnesQFailsWithCrossTerm) {
  const DescriptorSystem sys = Diag2(-1.0, -2.0);
  const WeierstrassForm wf = Decompose(sys, ComputeProjectors(sys));
  QuadraticWeights w{Eigen::MatrixXd::Ones(2, 2),
                     Eigen::MatrixXd::Identity(1, 1),
                     Eigen::MatrixXd::Zero(2, 2), 1.0};
  const CompatibilityReport r = CheckWeightCompatibility(w, ProjectorsOf(wf));
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.Q_X0_X1, 0.5);
  try {
    SplitWeightsFor(w, wf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleWeights);
  }
}

TEST(Weights, ValidationRejectsIndefiniteAndShapeErrors) {
  QuadraticWeights w{Eigen::MatrixXd::Identity(2, 2),
                     Eigen::MatrixXd::Zero(1, 1),
                     Eigen::MatrixXd::Zero(2, 2), 1.0};
  EXPECT_THROW(ValidateWeights(w, 2, 1), Error);
  w.R = Eigen::MatrixXd::Identity(1, 1);
  w.Q(0, 1) = 0.3;
  EXPECT_THROW(ValidateWeights(w, 2, 1), Error);
  w.Q = -Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(ValidateWeights(w, 2, 1), Error);
  w.Q = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(ValidateWeights(w, 2, 1), Error);
}

TEST(Weights, SplitOfZeroAndOfIdentityQ) {
  const DescriptorSystem sys = Diag2(-1.0, -2.0);
  const WeierstrassForm wf = Decompose(sys, ComputeProjectors(sys));
  QuadraticWeights w{Eigen::MatrixXd::Zero(2, 2),
                     Eigen::MatrixXd::Identity(1, 1),
                     Eigen::MatrixXd::Zero(2, 2), 1.0};
  SplitWeights sw = SplitWeightsFor(w, wf);
  EXPECT_EQ(sw.Q1.norm(), 0.0);
  EXPECT_EQ(sw.Q0.norm(), 0.0);
  EXPECT_NEAR(sw.Rt(0, 0), 1.0, 1e-15);
  w.Q = Eigen::MatrixXd::Identity(2, 2);
  sw = SplitWeightsFor(w, wf);
  EXPECT_NEAR(sw.Q0(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(sw.Rt(0, 0), 1.25, 1e-14);
}

TEST(Weights, FemSplitIsMassAndZero) {
  ParabolicEllipticParams pp;
  pp.n_elements = 6;
  const FemProblem fp = AssembleParabolicElliptic(pp);
  const WeierstrassForm wf = DecomposeSemiExplicit(fp.sys, 7);
  const SplitWeights sw = SplitWeightsFor(fp.weights, wf);
  EXPECT_LT((sw.Q1 - fp.fem.M).norm(), 1e-13);
  EXPECT_LT(sw.Q0.norm(), 1e-14);
  EXPECT_NEAR(sw.Rt(0, 0), 1.0, 1e-14);
}

// ---- finite elements ----------------------------------------------------

TEST(Fem, MassAndStiffnessIntegrateExactly) {
  const FemMatrices m = AssembleLinearElements(8);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(9);
  EXPECT_NEAR(one.dot(m.M * one), 1.0, 1e-14);
  EXPECT_LT((m.K * one).norm(), 1e-12);
  EXPECT_NEAR(m.load.sum(), 1.0, 1e-14);
  // int_0^1 x^2 dx and int_0^1 (d/dx x)^2 dx for the interpolant of x.
  const Eigen::VectorXd x = m.nodes;
  EXPECT_NEAR(x.dot(m.M * x), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(x.dot(m.K * x), 1.0, 1e-12);
  EXPECT_LT((m.M - m.M.transpose()).norm(), 1e-15);
  EXPECT_THROW(AssembleLinearElements(0), Error);
}

TEST(Fem, DefaultSystemDimensionAndConsistentInitialState) {
  const FemProblem fp = AssembleParabolicElliptic({});
  EXPECT_EQ(fp.sys.n_x(), 56);
  EXPECT_EQ(fp.sys.n_u(), 1);
  const Eigen::VectorXd w0 = fp.x_i.head(28);
  for (int k = 0; k < 28; ++k) {
    EXPECT_NEAR(w0(k), std::sin(std::numbers::pi * fp.fem.nodes(k)), 1e-15);
  }
  // The elliptic row holds for u(0) = 0.
  const Eigen::VectorXd res = (fp.sys.A() * fp.x_i).tail(28);
  EXPECT_LT(res.norm(), 1e-12);
}

TEST(Fem, InstabilityIndicator) {
  EXPECT_NEAR(InstabilityIndicator({}), 1.0, 1e-6);
  ParabolicEllipticParams p;
  p.alpha = 0.0;
  EXPECT_NEAR(InstabilityIndicator(p), -1.0, 1e-9);
  p.alpha = 2.0;
  p.beta = 0.0;
  EXPECT_NEAR(InstabilityIndicator(p), -1.0, 1e-9);
}

TEST(Fem, SingularEllipticOperatorRejected) {
  ParabolicEllipticParams p;
  p.gamma = 0.0;
  try {
    AssembleParabolicElliptic(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularElliptic);
  }
}

}  // namespace
}  // namespace dlqr
