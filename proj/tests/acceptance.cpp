// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dlqr/dlqr.hpp"
#include "reference.hpp"

namespace {

using namespace dlqr;

std::map<int, std::pair<bool, std::string>> results;

void Report(int id, bool pass, const std::string& what) {
  results[id] = {pass, what};
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void Guard(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    Report(id, false, std::string("exception: ") + e.what());
  }
}

ControlSignal SineSeries(const TimeGrid& g, std::mt19937_64& rng, double amp) {
  std::normal_distribution<double> nd;
  const double a1 = nd(rng), a2 = nd(rng), a3 = nd(rng);
  std::vector<Eigen::VectorXd> h(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = (g[k] - g.t0()) / (g.tf() - g.t0()) * std::numbers::pi;
    h[k] = Eigen::VectorXd::Constant(
        1, amp * (a1 * std::sin(s) + a2 * std::sin(2 * s) + a3 * std::sin(1.5 * s)));
  }
  return ControlSignal(g, std::move(h));
}

ControlSignal Add(const ControlSignal& a, const ControlSignal& b) {
  std::vector<Eigen::VectorXd> v(a.nodes().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.node(k) + b.node(k);
  return ControlSignal(a.grid(), std::move(v));
}

void LqrReduction() {
  double gain_err = 0.0, cost_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Problem p = RandomLqrProblem(seed, 4, 2, 2.0);
    PipelineOptions o;
    o.n_output_nodes = 201;
    o.open_loop_reference = false;
    const PipelineResult r = RunPipeline(p, o);
    const reference::HamiltonianLqr ref(p.sys.A(), p.sys.B(), p.weights.Q,
                                        p.weights.R, p.weights.G, p.weights.t_f);
    for (std::size_t k = 0; k < r.grid->size(); ++k) {
      const Eigen::MatrixXd Kr = ref.Gain((*r.grid)[k]);
      gain_err = std::max(gain_err, ((*r.gains)((*r.grid)[k]) - Kr).norm() / Kr.norm());
    }
    const double J = ref.Cost(p.x_i);
    cost_err = std::max(cost_err, std::abs(r.J_min_formula - J) / J);
  }
  Report(1, gain_err <= 1e-6 && cost_err <= 1e-6,
         "LQR reduction, 5 instances: gain rel err " + Num(gain_err) +
             ", cost rel err " + Num(cost_err) + " (tol 1e-6)");
}

void ReferenceExample() {
  const ParabolicEllipticParams pp;
  const Problem p = ParabolicEllipticProblem(pp);
  PipelineOptions o;
  o.n_output_nodes = 2001;
  const PipelineResult r = RunPipeline(p, o);
  const Trajectory& cl = *r.closed_loop;

  Guard(2, [&] {
    const double rate = InstabilityIndicator(pp);
    const double x0 = cl.x.front().norm(), xf = cl.x.back().norm();
    const double J0 = r.open_loop_zero->J;
    const double cres = ConsistencyResidual(cl, r.wf);
    const bool ok = std::abs(rate - 1.0) <= 1e-6 && xf < 0.1 * x0 &&
                    r.J_feedback < J0 && cres <= 1e-9;
    Report(2, ok,
           "27-element example: open-loop rate " + Num(rate) + " (1 +- 1e-6), |x(tf)|/|x(0)| " +
               Num(xf / x0) + " (< 0.1), J_feedback " + Num(r.J_feedback) +
               " < J(u=0) " + Num(J0) + ", consistency " + Num(cres) +
               " (tol 1e-9)");
  });

  Guard(3, [&] {
    const double rel = std::abs(r.J_feedback - r.J_min_formula) / r.J_feedback;
    Report(3, rel <= 1e-3,
           "minimum-cost formula: J_sim " + Num(r.J_feedback) + ", <Ex_i, Pit1(0) Ex_i> " +
               Num(r.J_min_formula) + ", rel gap " + Num(rel) + " (tol 1e-3)");
  });

  Guard(5, [&] {
    const ControlSignal u = cl.Control();
    const double zu =
        VariationGradient(u, cl, r.wf, r.split, p.weights, o.sim.bdf).SupNorm();
    const double zu_tol = 1e-4 * (1.0 + u.SupNorm());
    const double J =
        EvaluateCost(SimulateOpenLoop(r.wf, u, p.x_i, *r.grid, o.sim), p.weights);
    std::mt19937_64 rng(0x5EED);
    int increased = 0;
    double min_increase = INFINITY;
    for (int i = 0; i < 10; ++i) {
      const ControlSignal uh = Add(u, SineSeries(*r.grid, rng, 0.05));
      const double Jh = EvaluateCost(
          SimulateOpenLoop(r.wf, uh, p.x_i, *r.grid, o.sim), p.weights);
      if (Jh > J) ++increased;
      min_increase = std::min(min_increase, Jh - J);
    }

    const Problem sp = [] {
      Problem s = ScalarProblem();
      s.weights.Q = Eigen::MatrixXd::Identity(2, 2);
      return s;
    }();
    PipelineOptions so;
    so.n_output_nodes = 2001;
    so.open_loop_reference = false;
    const PipelineResult sr = RunPipeline(sp, so);
    const ControlSignal su = sr.closed_loop->Control();
    double gap = 0.0;
    for (int i = 0; i < 3; ++i) {
      const VariationIdentity v = VariationIdentityCheck(
          su, SineSeries(*sr.grid, rng, 0.3), sp.x_i, sr.wf, sr.split, sp.weights,
          so.sim);
      gap = std::max(gap, v.gap / std::abs(v.lhs));
    }
    Report(5, zu <= zu_tol && increased == 10 && gap <= 1e-6,
           "optimality certificate: |z_u| " + Num(zu) + " (tol " + Num(zu_tol) +
               "), perturbations increasing cost " + std::to_string(increased) +
               "/10 (min increase " + Num(min_increase) +
               "), variation identity rel gap " + Num(gap) + " (tol 1e-6)");
  });

  Guard(6, [&] {
    double fem = 0.0;
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
      fem = std::max(fem, MeasureProjectionFreeResidual(*r.riccati, p.sys, p.weights,
                                                        r.wf, r.split, t)
                              .full);
    }
    const Problem sp = ScalarProblem();
    PipelineOptions so;
    so.n_output_nodes = 2001;
    so.open_loop_reference = false;
    const PipelineResult sr = RunPipeline(sp, so);
    double sc = 0.0;
    for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
      sc = std::max(sc, MeasureProjectionFreeResidual(*sr.riccati, sp.sys,
                                                      sp.weights, sr.wf, sr.split, t)
                            .full);
    }
    Report(6, fem <= 1e-5 && sc <= 1e-6,
           "projection-free residual: 27-element example " + Num(fem) +
               " (tol 1e-5), scalar " + Num(sc) + " (tol 1e-6)");
  });

  Guard(7, [&] {
    const Eigen::Index n = p.sys.n_z();
    std::mt19937_64 rng(0x5EED);
    std::normal_distribution<double> nd;
    auto zero = [n](double) { return Eigen::MatrixXd::Zero(n, n).eval(); };
    std::vector<Eigen::MatrixXd> PE;
    for (std::size_t k = 0; k < r.riccati->grid().size(); ++k) {
      PE.push_back(r.riccati->Pit1Node(k) * p.sys.E());
    }
    const double nE = p.sys.E().norm();
    double ze = 0.0, dk = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::MatrixXd W(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) W(i, j) = nd(rng);
      const Eigen::MatrixXd Ws = W + W.transpose();
      const double f = 1.0 + trial;
      auto z4 = [&](double t) { return (std::sin(f * t) * Ws).eval(); };
      const auto Z = PerturbGeneralSolution(*r.riccati, r.projectors, zero, z4);
      for (std::size_t k = 0; k < Z.size(); ++k) {
        ze = std::max(ze, (Z[k] * p.sys.E() - PE[k]).norm() / nE);
      }
      const GainSchedule K =
          FeedbackGainFromNodes(r.riccati->grid(), Z, r.riccati->Pit0, p.sys, p.weights);
      for (std::size_t k = 0; k < Z.size(); ++k) {
        dk = std::max(dk, (K.node(k) - r.gains->node(k)).norm());
      }
    }
    Report(7, ze <= 1e-12 && dk <= 1e-10,
           "general-solution invariance: |ZE - Pit1 E|/|E| " + Num(ze) +
               " (tol 1e-12), gain difference " + Num(dk) + " (tol 1e-10)");
  });

  Guard(8, [&] {
    double d1 = 0.0, d0 = 0.0;
    for (double t0 : {pp.t_f / 4, pp.t_f / 2, 3 * pp.t_f / 4}) {
      const RestartDeviation d =
          OptimalityRestartDeviation(cl, t0, r.wf, *r.gains, o.sim);
      d1 = std::max(d1, d.x1);
      d0 = std::max(d0, d.x0);
    }
    Report(8, d1 <= 1e-5 && d0 <= 1e-5,
           "principle of optimality: restart deviation x1 " + Num(d1) + ", x0 " +
               Num(d0) + " (tol 1e-5)");
  });
}

void TripleAgreement() {
  ParabolicEllipticParams pp;
  pp.n_elements = 4;
  const Problem p = ParabolicEllipticProblem(pp);
  PipelineOptions o;
  o.n_output_nodes = 2001;
  o.picard = true;
  const PipelineResult r = RunPipeline(p, o);
  const ControlSignal u = r.closed_loop->Control();
  const double dp = SupDistance(r.picard->u, u);
  const double dp_tol = 1e-4 * u.SupNorm();
  const OracleResult o400 = DirectTranscription(r.wf, r.split, p.weights, p.x_i, 400);
  const OracleResult o800 = DirectTranscription(r.wf, r.split, p.weights, p.x_i, 800);
  const double g400 = std::abs(o400.J_star - r.J_feedback) / r.J_feedback;
  const double g800 = std::abs(o800.J_star - r.J_feedback) / r.J_feedback;
  Report(4, dp <= dp_tol && g400 <= 1e-2 && g800 < g400,
         "triple agreement (4 elements): Picard sup diff " + Num(dp) + " (tol " +
             Num(dp_tol) + "), oracle(400) rel gap " + Num(g400) +
             " (tol 1e-2), oracle(800) rel gap " + Num(g800) + " (must shrink)");
}

void StructuralGates() {
  double worst = 0.0;
  std::vector<Problem> shipped = {ParabolicEllipticProblem({}), ScalarProblem(),
                                  RandomLqrProblem(1, 4, 2, 2.0)};
  for (const Problem& p : shipped) {
    const PipelineResult r = Prepare(p, {});
    worst = std::max(worst, r.projector_residuals.max());
  }
  Eigen::MatrixXd E(2, 2);
  E << 0, 1, 0, 0;
  bool rejected = false;
  try {
    ValidatePencil(DescriptorSystem(E, Eigen::MatrixXd::Identity(2, 2),
                                    Eigen::MatrixXd::Ones(2, 1)));
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::kHigherIndex;
  }
  Report(9, worst <= 1e-8 && rejected,
         "structural gates: worst projector residual " + Num(worst) +
             " (tol 1e-8), nilpotent pencil rejected as HigherIndex: " +
             (rejected ? "yes" : "no"));
}

}  // namespace

int main() {
  Guard(1, LqrReduction);
  try {
    ReferenceExample();
  } catch (const std::exception& e) {
    for (int id : {2, 3, 5, 6, 7, 8}) {
      Report(id, false, std::string("27-element example failed: ") + e.what());
    }
  }
  Guard(4, TripleAgreement);
  Guard(9, StructuralGates);
  int failures = 0;
  for (const auto& [id, r] : results) {
    std::printf("%s [%d] %s\n", r.first ? "PASS" : "FAIL", id, r.second.c_str());
    if (!r.first) ++failures;
  }
  std::printf("%d of %zu criteria failed\n", failures, results.size());
  return failures == 0 ? 0 : 1;
}
