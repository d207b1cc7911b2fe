#include "dlqr/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlqr/errors.hpp"

namespace dlqr {
namespace {

Trajectory Assemble(const WeierstrassForm& wf, const TimeGrid& grid,
                    std::vector<Eigen::VectorXd> c1,
                    std::vector<Eigen::VectorXd> u) {
  Trajectory traj{grid, {}, std::move(c1), {}, std::move(u)};
  const std::size_t n = grid.size();
  traj.x.resize(n);
  traj.x0c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    traj.x0c[k] = -wf.Bt0 * traj.u[k];
    traj.x[k] = wf.Lift(traj.x1c[k], traj.x0c[k]);
  }
  return traj;
}

double AdmissibilityGap(const WeierstrassForm& wf, const Eigen::VectorXd& x_i,
                        const Eigen::VectorXd& u0) {
  return (wf.coord_X0 * x_i + wf.Bt0 * u0).norm();
}

void EnforcePolicy(double gap, const Eigen::VectorXd& x_i,
                   const SimulationOptions& opts) {
  if (opts.policy == ConsistencyPolicy::kStrict &&
      gap > opts.tol_consist * (1.0 + x_i.norm())) {
    Throw(ErrorCode::kInconsistentInput,
          "initial algebraic state differs from -Bt0 u(0) by " +
              Sci(gap));
  }
}

void CheckState(const WeierstrassForm& wf, const Eigen::VectorXd& x_i) {
  if (x_i.size() != wf.n_x()) {
    Throw(ErrorCode::kDimensionMismatch, "initial state has wrong size");
  }
}

}  // namespace

Trajectory SimulateOpenLoop(const WeierstrassForm& wf, const ControlSignal& u,
                            const Eigen::VectorXd& x_i, const TimeGrid& grid,
                            const SimulationOptions& opts) {
  CheckState(wf, x_i);
  if (u.n_u() != wf.n_u()) {
    Throw(ErrorCode::kDimensionMismatch, "control has wrong size");
  }
  const double gap = AdmissibilityGap(wf, x_i, u(grid.t0()));
  EnforcePolicy(gap, x_i, opts);

  OdeSystem ode;
  ode.rhs = [&](double t, const Eigen::VectorXd& c) -> Eigen::VectorXd {
    return wf.At1 * c + wf.Bt1 * u(t);
  };
  ode.jacobian = [&](double, const Eigen::VectorXd&) { return wf.At1; };
  auto c1 = IntegrateBdf2(ode, grid, wf.coord_X1 * x_i, Direction::kForward,
                          opts.bdf);
  std::vector<Eigen::VectorXd> us(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) us[k] = u(grid[k]);
  Trajectory traj = Assemble(wf, grid, std::move(c1), std::move(us));
  traj.initial_admissibility_gap = gap;
  return traj;
}

Eigen::MatrixXd CondensedGain(const WeierstrassForm& wf,
                              const Eigen::MatrixXd& K) {
  const Eigen::Index m = wf.n_u();
  const Eigen::MatrixXd C =
      Eigen::MatrixXd::Identity(m, m) - K * wf.basis_X0 * wf.Bt0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  const double rc = lu.rcond();
  if (!(rc > 1e-13)) {
    Throw(ErrorCode::kSingularClosedLoopCoupling,
          "I - K V0 Bt0 is singular (rcond = " + Sci(rc) + ")");
  }
  return lu.solve(K * wf.basis_X1);
}

Trajectory SimulateClosedLoop(const WeierstrassForm& wf,
                              const GainSchedule& gains,
                              const Eigen::VectorXd& x_i, const TimeGrid& grid,
                              const SimulationOptions& opts) {
  CheckState(wf, x_i);
  const Eigen::VectorXd c0 = wf.coord_X1 * x_i;
  const Eigen::VectorXd u0 = -CondensedGain(wf, gains(grid.t0())) * c0;
  const double gap = AdmissibilityGap(wf, x_i, u0);
  EnforcePolicy(gap, x_i, opts);

  OdeSystem ode;
  ode.rhs = [&](double t, const Eigen::VectorXd& c) -> Eigen::VectorXd {
    return wf.At1 * c - wf.Bt1 * (CondensedGain(wf, gains(t)) * c);
  };
  ode.jacobian = [&](double t, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return wf.At1 - wf.Bt1 * CondensedGain(wf, gains(t));
  };
  auto c1 = IntegrateBdf2(ode, grid, c0, Direction::kForward, opts.bdf);
  std::vector<Eigen::VectorXd> us(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    us[k] = -CondensedGain(wf, gains(grid[k])) * c1[k];
  }
  Trajectory traj = Assemble(wf, grid, std::move(c1), std::move(us));
  traj.initial_admissibility_gap = gap;
  return traj;
}

double Simpson(const TimeGrid& grid, const std::vector<double>& f) {
  const std::size_t n = grid.size();
  if (f.size() != n) {
    Throw(ErrorCode::kGridMismatch, "one sample per node required");
  }
  if (n == 2) return 0.5 * (grid[1] - grid[0]) * (f[0] + f[1]);
  double acc = 0.0;
  std::size_t k = 0;
  for (; k + 2 < n; k += 2) {
    const double h0 = grid[k + 1] - grid[k];
    const double h1 = grid[k + 2] - grid[k + 1];
    const double hs = h0 + h1;
    acc += hs / 6.0 *
           ((2.0 - h1 / h0) * f[k] + hs * hs / (h0 * h1) * f[k + 1] +
            (2.0 - h0 / h1) * f[k + 2]);
  }
  if (k + 1 < n) {
    // Integral over the last interval of the quadratic through the last
    // three samples, with the middle sample at the origin.
    const double h0 = grid[k] - grid[k - 1];
    const double h1 = grid[k + 1] - grid[k];
    const double f0 = f[k - 1], f1 = f[k], f2 = f[k + 1];
    const double c =
        ((f2 - f1) / h1 + (f0 - f1) / h0) / (h0 + h1);
    const double b = (f2 - f1) / h1 - c * h1;
    acc += f1 * h1 + b * h1 * h1 / 2.0 + c * h1 * h1 * h1 / 3.0;
  }
  return acc;
}

double EvaluateCost(const Trajectory& traj, const QuadraticWeights& w) {
  const std::size_t n = traj.grid.size();
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    f[k] = traj.x[k].dot(w.Q * traj.x[k]) + traj.u[k].dot(w.R * traj.u[k]);
  }
  const Eigen::VectorXd& xf = traj.x.back();
  return xf.dot(w.G * xf) + Simpson(traj.grid, f);
}

double ConsistencyResidual(const Trajectory& traj, const WeierstrassForm& wf) {
  double m = 0.0;
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const double r = (traj.x0c[k] + wf.Bt0 * traj.u[k]).norm() /
                     (1.0 + traj.u[k].norm());
    m = std::max(m, r);
  }
  return m;
}

RestartDeviation OptimalityRestartDeviation(const Trajectory& traj, double t0,
                                            const WeierstrassForm& wf,
                                            const GainSchedule& gains,
                                            const SimulationOptions& opts) {
  const auto idx = traj.grid.IndexOf(t0, 1e-9);
  if (!idx) {
    Throw(ErrorCode::kOutOfGrid,
          "restart time " + Sci(t0) + " is not a trajectory node");
  }
  RestartDeviation dev;
  const std::size_t k0 = *idx;
  if (k0 + 1 >= traj.grid.size()) return dev;
  const TimeGrid tail = traj.grid.Tail(traj.grid[k0]);
  SimulationOptions o = opts;
  o.policy = ConsistencyPolicy::kFromControl;
  const Trajectory re = SimulateClosedLoop(wf, gains, traj.x[k0], tail, o);
  for (std::size_t j = 0; j < tail.size(); ++j) {
    const std::size_t k = k0 + j;
    const Eigen::VectorXd d1 = re.x1c[j] - traj.x1c[k];
    const Eigen::VectorXd d0 = re.x0c[j] - traj.x0c[k];
    if (d1.size()) dev.x1 = std::max(dev.x1, d1.cwiseAbs().maxCoeff());
    if (d0.size()) dev.x0 = std::max(dev.x0, d0.cwiseAbs().maxCoeff());
  }
  return dev;
}

}  // namespace dlqr
