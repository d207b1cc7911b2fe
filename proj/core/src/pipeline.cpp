#include "dlqr/pipeline.hpp"

#include <random>

#include "dlqr/errors.hpp"

namespace dlqr {

Problem ScalarProblem() {
  Eigen::MatrixXd E(2, 2), A(2, 2), B(2, 1);
  E << 1, 0, 0, 0;
  A << -1, 0, 0, -2;
  B << 1, 1;
  QuadraticWeights w;
  w.Q = Eigen::MatrixXd::Zero(2, 2);
  w.Q(0, 0) = 1.0;
  w.R = Eigen::MatrixXd::Identity(1, 1);
  w.G = Eigen::MatrixXd::Zero(2, 2);
  w.t_f = 6.0;
  Eigen::VectorXd x_i(2);
  x_i << 1.0, 0.0;
  return Problem{"scalar", DescriptorSystem(E, A, B), w, x_i, std::nullopt};
}

Problem RandomLqrProblem(std::uint64_t seed, Eigen::Index n_x,
                         Eigen::Index n_u, double t_f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto randn = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
    }
    return m;
  };
  Eigen::MatrixXd A = randn(n_x, n_x);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  const double shift = es.eigenvalues().real().maxCoeff() + 0.5;
  A -= shift * Eigen::MatrixXd::Identity(n_x, n_x);
  const Eigen::MatrixXd B = randn(n_x, n_u);
  const Eigen::MatrixXd Lq = randn(n_x, n_x);
  const Eigen::MatrixXd Lg = randn(n_x, n_x);
  QuadraticWeights w;
  w.Q = Lq * Lq.transpose() / static_cast<double>(n_x);
  w.G = Lg * Lg.transpose() / static_cast<double>(n_x);
  w.R = Eigen::MatrixXd::Identity(n_u, n_u);
  w.t_f = t_f;
  const Eigen::VectorXd x_i = randn(n_x, 1);
  return Problem{"lqr-" + std::to_string(seed),
                 DescriptorSystem(Eigen::MatrixXd::Identity(n_x, n_x), A, B),
                 w, x_i, std::nullopt};
}

Problem ParabolicEllipticProblem(const ParabolicEllipticParams& p) {
  FemProblem fp = AssembleParabolicElliptic(p);
  return Problem{"paper-example", std::move(fp.sys), std::move(fp.weights),
                 std::move(fp.x_i), p};
}

PipelineResult Prepare(const Problem& problem, const PipelineOptions& opts) {
  const DescriptorSystem& sys = problem.sys;
  ValidateWeights(problem.weights, sys.n_x(), sys.n_u());
  if (problem.x_i.size() != sys.n_x()) {
    Throw(ErrorCode::kDimensionMismatch, "initial state has wrong size");
  }
  PipelineResult res;
  res.pencil = ValidatePencil(sys, opts.pencil);
  if (opts.semi_explicit) {
    const Eigen::Index n1 = DetectSemiExplicitBlock(sys.E());
    WeierstrassOptions wo = opts.weierstrass;
    res.wf = DecomposeSemiExplicit(sys, n1, wo);
    res.projectors = ProjectorsOf(res.wf);
  } else {
    res.projectors = ComputeProjectors(sys, opts.pencil);
    res.wf = Decompose(sys, res.projectors, opts.weierstrass);
  }
  res.projector_residuals = MeasureProjectors(sys, res.projectors);
  res.compatibility = CheckWeightCompatibility(problem.weights, res.projectors,
                                               opts.tol_weights);
  res.split = SplitWeightsFor(problem.weights, res.wf, opts.tol_weights);
  res.algebraic = SolveAlgebraicPi0(sys, res.wf, res.split, problem.weights);
  return res;
}

PipelineResult RunPipeline(const Problem& problem,
                           const PipelineOptions& opts) {
  PipelineResult res = Prepare(problem, opts);
  const DescriptorSystem& sys = problem.sys;
  const QuadraticWeights& w = problem.weights;
  if (opts.n_output_nodes < 3) {
    Throw(ErrorCode::kConfig, "at least three output nodes are required");
  }
  res.grid = TimeGrid::Uniform(0.0, w.t_f, opts.n_output_nodes);

  RiccatiSolution rs = SolveProjectedDre(res.wf, res.split, *res.grid, opts.dre);
  LiftProjectionFree(rs, res.wf, res.algebraic);
  res.riccati = std::move(rs);
  res.gains = FeedbackGain(*res.riccati, sys, w);
  res.closed_loop =
      SimulateClosedLoop(res.wf, *res.gains, problem.x_i, *res.grid, opts.sim);
  res.J_feedback = EvaluateCost(*res.closed_loop, w);
  res.closed_loop->J = res.J_feedback;
  res.J_min_formula = MinimumCost(*res.riccati, sys, problem.x_i);
  res.J_min_projected = MinimumCostProjected(*res.riccati, res.wf, problem.x_i);

  if (opts.open_loop_reference) {
    SimulationOptions so = opts.sim;
    so.policy = ConsistencyPolicy::kFromControl;
    res.open_loop_zero =
        SimulateOpenLoop(res.wf, ControlSignal::Zero(*res.grid, sys.n_u()),
                         problem.x_i, *res.grid, so);
    res.open_loop_zero->J = EvaluateCost(*res.open_loop_zero, w);
  }
  if (opts.picard) {
    res.picard = PicardSolve(res.wf, res.split, problem.x_i, *res.grid,
                             opts.picard_options);
  }
  if (opts.oracle) {
    res.oracle = DirectTranscription(res.wf, res.split, w, problem.x_i,
                                     opts.oracle_steps);
  }
  return res;
}

}  // namespace dlqr
