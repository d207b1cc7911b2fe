#include "dlqr/control.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "dlqr/errors.hpp"

namespace dlqr {
namespace {

Eigen::VectorXd Flatten(const ControlSignal& u) {
  const Eigen::Index m = u.n_u();
  Eigen::VectorXd v(static_cast<Eigen::Index>(u.nodes().size()) * m);
  for (std::size_t k = 0; k < u.nodes().size(); ++k) {
    v.segment(static_cast<Eigen::Index>(k) * m, m) = u.node(k);
  }
  return v;
}

ControlSignal Unflatten(const TimeGrid& grid, const Eigen::VectorXd& v,
                        Eigen::Index m) {
  std::vector<Eigen::VectorXd> u(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    u[k] = v.segment(static_cast<Eigen::Index>(k) * m, m);
  }
  return ControlSignal(grid, std::move(u));
}

}  // namespace

GainSchedule FeedbackGain(const RiccatiSolution& rs,
                          const DescriptorSystem& sys,
                          const QuadraticWeights& w) {
  const Eigen::LLT<Eigen::MatrixXd> Rllt(w.R);
  const Eigen::MatrixXd RBt = Rllt.solve(sys.B().transpose());
  const Eigen::MatrixXd K0 = RBt * rs.Pit0;
  const Eigen::MatrixXd W = RBt * rs.lift.transpose();
  const Eigen::MatrixXd LE = rs.lift * sys.E();
  const TimeGrid& grid = rs.grid();
  std::vector<Eigen::MatrixXd> K(grid.size()), dK(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    K[k] = K0 + W * rs.Pi1.value(k) * LE;
    dK[k] = W * rs.Pi1.slope(k) * LE;
  }
  return GainSchedule{HermiteSeries(grid, std::move(K), std::move(dK))};
}

GainSchedule FeedbackGainFromNodes(const TimeGrid& grid,
                                   const std::vector<Eigen::MatrixXd>& Z,
                                   const Eigen::MatrixXd& Pit0,
                                   const DescriptorSystem& sys,
                                   const QuadraticWeights& w) {
  if (Z.size() != grid.size()) {
    Throw(ErrorCode::kGridMismatch, "one matrix per node required");
  }
  const Eigen::LLT<Eigen::MatrixXd> Rllt(w.R);
  const Eigen::MatrixXd RBt = Rllt.solve(sys.B().transpose());
  std::vector<Eigen::MatrixXd> K(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    K[k] = RBt * (Pit0 + Z[k] * sys.E());
  }
  return GainSchedule{HermiteSeries::FromValues(grid, std::move(K))};
}

ConsistencyReport CheckAdmissible(const ControlSignal& u,
                                  const Eigen::VectorXd& x_i,
                                  const WeierstrassForm& wf,
                                  double tol_consist) {
  if (x_i.size() != wf.n_x() || u.n_u() != wf.n_u()) {
    Throw(ErrorCode::kDimensionMismatch, "state or control has wrong size");
  }
  ConsistencyReport rep;
  rep.residual = (wf.coord_X0 * x_i + wf.Bt0 * u.node(0)).norm();
  rep.tol = tol_consist * (1.0 + x_i.norm());
  rep.pass = rep.residual <= rep.tol;
  return rep;
}

std::vector<Eigen::VectorXd> SolveAdjoint(const Trajectory& traj,
                                          const WeierstrassForm& wf,
                                          const SplitWeights& sw,
                                          const Bdf2Options& bdf) {
  const TimeGrid& grid = traj.grid;
  std::vector<Eigen::MatrixXd> c(grid.size()), dc(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    c[k] = traj.x1c[k];
    dc[k] = wf.At1 * traj.x1c[k] + wf.Bt1 * traj.u[k];
  }
  const HermiteSeries x1(grid, std::move(c), std::move(dc));
  const Eigen::MatrixXd AT = wf.At1.transpose();
  OdeSystem ode;
  ode.rhs = [&](double t, const Eigen::VectorXd& l) -> Eigen::VectorXd {
    return -AT * l - sw.Q1 * x1.Evaluate(t);
  };
  ode.jacobian = [&](double, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return -AT;
  };
  return IntegrateBdf2(ode, grid, sw.G1 * traj.x1c.back(),
                       Direction::kBackward, bdf);
}

ControlSignal VariationGradient(const ControlSignal& u, const Trajectory& traj,
                                const WeierstrassForm& wf,
                                const SplitWeights& sw,
                                const QuadraticWeights& w,
                                const Bdf2Options& bdf) {
  if (!u.grid().SameAs(traj.grid)) {
    Throw(ErrorCode::kGridMismatch, "control and trajectory grids differ");
  }
  const auto lambda = SolveAdjoint(traj, wf, sw, bdf);
  std::vector<Eigen::VectorXd> z(traj.grid.size());
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = 2.0 * (wf.Bt1.transpose() * lambda[k] -
                  wf.Bt0.transpose() * (sw.Q0 * traj.x0c[k]) +
                  w.R * u.node(k));
  }
  return ControlSignal(traj.grid, std::move(z));
}

VariationIdentity VariationIdentityCheck(const ControlSignal& u,
                                         const ControlSignal& h,
                                         const Eigen::VectorXd& x_i,
                                         const WeierstrassForm& wf,
                                         const SplitWeights& sw,
                                         const QuadraticWeights& w,
                                         const SimulationOptions& sim) {
  if (!u.grid().SameAs(h.grid())) {
    Throw(ErrorCode::kGridMismatch, "u and h must share a grid");
  }
  const double h0 = (wf.Bt0 * h.node(0)).norm();
  if (h0 > 1e-12 * (1.0 + h.node(0).norm())) {
    Throw(ErrorCode::kInadmissibleVariation,
          "Bt0 h(0) = " + Sci(h0) + " is not zero");
  }
  const TimeGrid& grid = u.grid();
  std::vector<Eigen::VectorXd> uh(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) uh[k] = u.node(k) + h.node(k);
  const ControlSignal u_plus(grid, std::move(uh));

  const Trajectory tu = SimulateOpenLoop(wf, u, x_i, grid, sim);
  const Trajectory tuh = SimulateOpenLoop(wf, u_plus, x_i, grid, sim);
  SimulationOptions strict = sim;
  strict.policy = ConsistencyPolicy::kStrict;
  const Trajectory th = SimulateOpenLoop(
      wf, h, Eigen::VectorXd::Zero(wf.n_x()), grid, strict);

  VariationIdentity out;
  out.lhs = EvaluateCost(tuh, w) - EvaluateCost(tu, w);
  const ControlSignal z = VariationGradient(u, tu, wf, sw, w, sim.bdf);
  std::vector<double> zh(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    zh[k] = z.node(k).dot(h.node(k));
  }
  out.rhs = Simpson(grid, zh) + EvaluateCost(th, w);
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

ControlSignal FixedPointMap(const ControlSignal& u, const Eigen::VectorXd& x_i,
                            const WeierstrassForm& wf, const SplitWeights& sw,
                            const Bdf2Options& bdf) {
  SimulationOptions sim;
  sim.bdf = bdf;
  sim.policy = ConsistencyPolicy::kFromControl;
  const Trajectory traj = SimulateOpenLoop(wf, u, x_i, u.grid(), sim);
  const auto lambda = SolveAdjoint(traj, wf, sw, bdf);
  const Eigen::LLT<Eigen::MatrixXd> Rt(sw.Rt);
  std::vector<Eigen::VectorXd> out(lambda.size());
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    out[k] = -Rt.solve(wf.Bt1.transpose() * lambda[k]);
  }
  return ControlSignal(u.grid(), std::move(out));
}

PicardResult PicardSolve(const WeierstrassForm& wf, const SplitWeights& sw,
                         const Eigen::VectorXd& x_i, const TimeGrid& grid,
                         const PicardOptions& opts) {
  if (x_i.size() != wf.n_x()) {
    Throw(ErrorCode::kDimensionMismatch, "initial state has wrong size");
  }
  if (wf.rank_0() > 0) {
    const Eigen::VectorXd x0 = wf.coord_X0 * x_i;
    const Eigen::VectorXd u0 =
        wf.Bt0.completeOrthogonalDecomposition().solve(-x0);
    const double r = (wf.Bt0 * u0 + x0).norm();
    if (r > opts.tol_consist * (1.0 + x_i.norm())) {
      Throw(ErrorCode::kInconsistentInitialData,
            "algebraic part of x_i is not reachable through Bt0 (residual " +
                Sci(r) + ")");
    }
  }

  const Eigen::Index m = wf.n_u();
  ControlSignal u = ControlSignal::Zero(grid, m);
  Eigen::VectorXd x = Flatten(u);
  std::deque<Eigen::VectorXd> xs, gs;
  PicardResult res{u, 0, 0.0, {}};
  for (int it = 1; it <= opts.max_iter; ++it) {
    const ControlSignal Fu = FixedPointMap(u, x_i, wf, sw, opts.bdf);
    const Eigen::VectorXd fx = Flatten(Fu);
    const Eigen::VectorXd g = fx - x;
    const double inc = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    res.history.push_back(inc);
    res.iterations = it;
    res.increment = inc;
    if (!std::isfinite(inc)) break;
    if (inc <= opts.tol_fp) {
      res.u = Fu;
      return res;
    }
    Eigen::VectorXd x_next = fx;
    if (opts.anderson_depth > 0) {
      xs.push_back(x);
      gs.push_back(g);
      if (static_cast<int>(xs.size()) > opts.anderson_depth + 1) {
        xs.pop_front();
        gs.pop_front();
      }
      const Eigen::Index cols = static_cast<Eigen::Index>(xs.size()) - 1;
      if (cols > 0) {
        Eigen::MatrixXd dX(x.size(), cols), dG(x.size(), cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
          dX.col(j) = xs[j + 1] - xs[j];
          dG.col(j) = gs[j + 1] - gs[j];
        }
        const Eigen::VectorXd gamma = dG.colPivHouseholderQr().solve(g);
        if (gamma.allFinite()) x_next = x + g - (dX + dG) * gamma;
      }
    }
    x = std::move(x_next);
    u = Unflatten(grid, x, m);
  }
  Throw(ErrorCode::kNoConvergence,
        "fixed-point iteration did not converge in " +
            std::to_string(opts.max_iter) + " evaluations (last increment " +
            Sci(res.increment) + ")");
}

}  // namespace dlqr
