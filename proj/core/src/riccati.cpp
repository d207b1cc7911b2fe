#include "dlqr/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "dlqr/errors.hpp"
#include "dlqr/linalg.hpp"

namespace dlqr {
namespace {

// dP/ds = P A + A^T P - P S P + Q in reversed time s = t_f - t.
struct ReversedDre {
  Eigen::MatrixXd A, S, Q;

  Eigen::MatrixXd operator()(const Eigen::MatrixXd& P) const {
    const Eigen::MatrixXd PA = P * A;
    return PA + PA.transpose() - P * S * P + Q;
  }
};

double ScaledRms(const Eigen::MatrixXd& e, const Eigen::MatrixXd& y0,
                 const Eigen::MatrixXd& y1, double rtol, double atol) {
  if (e.size() == 0) return 0.0;
  const Eigen::ArrayXXd sc =
      atol + rtol * y0.array().abs().max(y1.array().abs());
  return std::sqrt((e.array() / sc).square().mean());
}

double InitialStep(const ReversedDre& f, const Eigen::MatrixXd& P0,
                   double span, int order, double rtol, double atol) {
  const Eigen::MatrixXd f0 = f(P0);
  const double d0 = ScaledRms(P0, P0, P0, rtol, atol);
  const double d1 = ScaledRms(f0, P0, P0, rtol, atol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const Eigen::MatrixXd P1 = P0 + h0 * f0;
  const double d2 = ScaledRms(f(P1) - f0, P0, P0, rtol, atol) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                : std::pow(0.01 / dm, 1.0 / (order + 1));
  return std::min({100.0 * h0, h1, span});
}

struct StepRecord {
  double s;
  Eigen::MatrixXd P, dPds;
};

class Dopri5 {
 public:
  static constexpr int kOrder = 4;  // of the error estimate

  explicit Dopri5(const ReversedDre& f) : f_(f) {}

  // Returns the scaled error; on success fills P_new and its slope.
  double Step(const Eigen::MatrixXd& P, const Eigen::MatrixXd& k1, double h,
              double rtol, double atol, Eigen::MatrixXd& P_new,
              Eigen::MatrixXd& k7) {
    const Eigen::MatrixXd k2 = f_(P + h * (1.0 / 5) * k1);
    const Eigen::MatrixXd k3 = f_(P + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
    const Eigen::MatrixXd k4 =
        f_(P + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
    const Eigen::MatrixXd k5 =
        f_(P + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                    64448.0 / 6561 * k3 - 212.0 / 729 * k4));
    const Eigen::MatrixXd k6 =
        f_(P + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                    46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                    5103.0 / 18656 * k5));
    P_new = P + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                     2187.0 / 6784 * k5 + 11.0 / 84 * k6);
    P_new = linalg::Symmetrize(P_new);
    k7 = f_(P_new);
    const Eigen::MatrixXd err =
        h * (71.0 / 57600 * k1 - 71.0 / 16695 * k3 + 71.0 / 1920 * k4 -
             17253.0 / 339200 * k5 + 22.0 / 525 * k6 - 1.0 / 40 * k7);
    return ScaledRms(err, P, P_new, rtol, atol);
  }

 private:
  const ReversedDre& f_;
};

// Hairer-Wanner SDIRK of order 4 with embedded order 3, gamma = 1/4,
// stiffly accurate.
class Sdirk4 {
 public:
  static constexpr int kOrder = 3;
  static constexpr double kGamma = 0.25;

  Sdirk4(const ReversedDre& f, DreStats& stats) : f_(f), stats_(stats) {}

  // Returns the scaled error, or +inf if a stage solve failed.
  double Step(const Eigen::MatrixXd& P, double h, double rtol, double atol,
              Eigen::MatrixXd& P_new, Eigen::MatrixXd& slope) {
    static constexpr double a[5][4] = {
        {0, 0, 0, 0},
        {1.0 / 2, 0, 0, 0},
        {17.0 / 50, -1.0 / 25, 0, 0},
        {371.0 / 1360, -137.0 / 2720, 15.0 / 544, 0},
        {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12}};
    static constexpr double e[5] = {-3.0 / 16, -27.0 / 32, 25.0 / 32, 0.0,
                                    1.0 / 4};
    // Newton matrix frozen at the closed-loop generator of the step start.
    const linalg::ShiftedLyapunovSolver lyap(f_.A - f_.S * P);
    const double hg = h * kGamma;
    std::array<Eigen::MatrixXd, 5> K;
    Eigen::MatrixXd Y;
    for (int i = 0; i < 5; ++i) {
      Eigen::MatrixXd Z = P;
      for (int j = 0; j < i; ++j) Z += h * a[i][j] * K[j];
      Y = Z + hg * (i == 0 ? f_(P) : K[i - 1]);
      double prev = INFINITY;
      bool ok = false;
      for (int it = 0; it < 12; ++it) {
        const Eigen::MatrixXd G = Y - hg * f_(Y) - Z;
        const Eigen::MatrixXd d = lyap.Solve(hg, G);
        Y -= d;
        Y = linalg::Symmetrize(Y);
        ++stats_.newton_iterations;
        const double nd = ScaledRms(d, P, Y, rtol, atol);
        if (!std::isfinite(nd)) break;
        if (nd <= 1e-3) {
          ok = true;
          break;
        }
        if (it > 0 && nd > 0.9 * prev) break;
        prev = nd;
      }
      if (!ok) return INFINITY;
      K[i] = (Y - Z) / hg;
    }
    P_new = Y;
    slope = f_(P_new);
    Eigen::MatrixXd err = Eigen::MatrixXd::Zero(P.rows(), P.cols());
    for (int i = 0; i < 5; ++i) err += h * e[i] * K[i];
    // Filtering through the Newton matrix keeps the estimate bounded on
    // stiff components.
    err = lyap.Solve(hg, err);
    return ScaledRms(err, P, P_new, rtol, atol);
  }

 private:
  const ReversedDre& f_;
  DreStats& stats_;
};

template <typename StepFn>
std::vector<StepRecord> March(const ReversedDre& f, const Eigen::MatrixXd& P0,
                              const std::vector<double>& stops, int order,
                              const DreOptions& opts, DreStats& stats,
                              StepFn&& step) {
  const double span = stops.back();
  std::vector<StepRecord> out;
  out.push_back({0.0, P0, f(P0)});
  double h = InitialStep(f, P0, span, order, opts.rtol, opts.atol);
  const double h_min = 1e-14 * std::max(1.0, span);
  std::size_t next = 1;
  double s = 0.0;
  Eigen::MatrixXd P = P0;
  Eigen::MatrixXd dP = out.back().dPds;
  Eigen::MatrixXd P_new, dP_new;
  while (next < stops.size()) {
    if (stats.accepted + stats.rejected >= opts.max_steps) {
      Throw(ErrorCode::kIntegrationFailure,
            "DRE step budget exhausted at t_f - t = " + Sci(s));
    }
    const double target = stops[next];
    bool clipped = false;
    double h_try = h;
    if (s + h_try >= target - 1e-12 * std::max(1.0, span)) {
      h_try = target - s;
      clipped = true;
    }
    const double err = step(P, dP, h_try, P_new, dP_new);
    const bool finite = std::isfinite(err) && P_new.allFinite();
    if (finite && err <= 1.0) {
      s = clipped ? target : s + h_try;
      P = P_new;
      dP = dP_new;
      if (P.cwiseAbs().maxCoeff() > 1e150) {
        Throw(ErrorCode::kIntegrationFailure,
              "DRE solution blew up at t_f - t = " + Sci(s));
      }
      out.push_back({s, P, dP});
      ++stats.accepted;
      if (clipped) ++next;
      const double fac =
          err == 0.0 ? 5.0
                     : std::clamp(0.9 * std::pow(err, -1.0 / (order + 1)),
                                  0.2, 5.0);
      // A step shortened to hit a node says nothing about the natural size.
      h = clipped ? std::max(h, h_try * fac) : h_try * fac;
    } else {
      ++stats.rejected;
      const double fac =
          finite ? std::clamp(0.9 * std::pow(err, -1.0 / (order + 1)), 0.1, 0.5)
                 : 0.25;
      h = h_try * fac;
    }
    if (h < h_min) {
      Throw(ErrorCode::kIntegrationFailure,
            "DRE step size underflow at t_f - t = " + Sci(s));
    }
  }
  return out;
}

double SpectralRadius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd RiccatiSolution::Pit1(double t) const {
  return lift.transpose() * Pi1.Evaluate(t) * lift;
}

Eigen::MatrixXd RiccatiSolution::Pit1Node(std::size_t k) const {
  return lift.transpose() * Pi1.value(k) * lift;
}

Eigen::MatrixXd RiccatiSolution::Pit1Derivative(double t) const {
  return lift.transpose() * Pi1.Derivative(t) * lift;
}

AlgebraicSolution SolveAlgebraicPi0(const DescriptorSystem& sys,
                                    const WeierstrassForm& wf,
                                    const SplitWeights& sw,
                                    const QuadraticWeights& w) {
  AlgebraicSolution out;
  const Eigen::Index n0 = wf.rank_0();
  if (n0 == 0) {
    out.Pi0.resize(0, 0);
  } else {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(wf.A0.transpose());
    if (!lu.isInvertible()) {
      Throw(ErrorCode::kSingularA0, "A0 is singular");
    }
    out.Pi0 = -lu.solve(sw.Q0);
  }
  out.Pit0 = wf.coord_Z0.transpose() * out.Pi0 * wf.coord_X0;
  const Eigen::MatrixXd P_X0 = wf.basis_X0 * wf.coord_X0;
  out.residual = (sys.A().transpose() * out.Pit0 + w.Q * P_X0).norm() /
                 std::max(w.Q.norm(), 1e-300);
  return out;
}

Eigen::MatrixXd DreRhs(const Eigen::MatrixXd& Pi1, const WeierstrassForm& wf,
                       const SplitWeights& sw) {
  const Eigen::MatrixXd RB = sw.Rt.llt().solve(wf.Bt1.transpose());
  const Eigen::MatrixXd PA = Pi1 * wf.At1;
  return -PA - PA.transpose() + Pi1 * wf.Bt1 * RB * Pi1 - sw.Q1;
}

RiccatiSolution SolveProjectedDre(const WeierstrassForm& wf,
                                  const SplitWeights& sw, const TimeGrid& grid,
                                  const DreOptions& opts) {
  const Eigen::Index r = wf.rank_1();
  ReversedDre f;
  f.A = wf.At1;
  f.S = linalg::Symmetrize(wf.Bt1 * sw.Rt.llt().solve(wf.Bt1.transpose()));
  f.Q = sw.Q1;

  DreStats stats;
  const double span = grid.tf() - grid.t0();
  stats.stiffness = SpectralRadius(wf.At1) * span;
  stats.method = opts.method;
  if (stats.method == DreMethod::kAuto) {
    stats.method = stats.stiffness > opts.stiffness_threshold
                       ? DreMethod::kImplicit
                       : DreMethod::kExplicit;
  }

  std::vector<double> stops(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    stops[k] = grid.tf() - grid[grid.size() - 1 - k];
  }
  stops.front() = 0.0;
  stops.back() = span;

  std::vector<StepRecord> rec;
  if (r == 0) {
    for (double s : stops) {
      rec.push_back({s, Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, 0)});
    }
  } else if (stats.method == DreMethod::kExplicit) {
    Dopri5 rk(f);
    rec = March(f, sw.G1, stops, Dopri5::kOrder, opts, stats,
                [&](const Eigen::MatrixXd& P, const Eigen::MatrixXd& dP,
                    double h, Eigen::MatrixXd& Pn, Eigen::MatrixXd& dPn) {
                  return rk.Step(P, dP, h, opts.rtol, opts.atol, Pn, dPn);
                });
  } else {
    Sdirk4 rk(f, stats);
    rec = March(f, sw.G1, stops, Sdirk4::kOrder, opts, stats,
                [&](const Eigen::MatrixXd& P, const Eigen::MatrixXd&, double h,
                    Eigen::MatrixXd& Pn, Eigen::MatrixXd& dPn) {
                  return rk.Step(P, h, opts.rtol, opts.atol, Pn, dPn);
                });
  }

  // Back to forward time; the requested nodes are reused verbatim.
  const std::size_t m = rec.size();
  std::vector<double> t(m);
  std::vector<Eigen::MatrixXd> values(m), slopes(m);
  for (std::size_t k = 0; k < m; ++k) {
    const StepRecord& sr = rec[m - 1 - k];
    t[k] = grid.tf() - sr.s;
    values[k] = sr.P;
    slopes[k] = -sr.dPds;
  }
  std::size_t g = 0;
  for (std::size_t k = 0; k < m && g < grid.size(); ++k) {
    if (std::abs(t[k] - grid[g]) <= 1e-12 * std::max(1.0, span)) {
      t[k] = grid[g++];
    }
  }
  values.back() = sw.G1;

  RiccatiSolution rs{HermiteSeries(TimeGrid(std::move(t)), std::move(values),
                                   std::move(slopes)),
                     Eigen::MatrixXd(), Eigen::MatrixXd(), Eigen::MatrixXd(),
                     stats};
  return rs;
}

void LiftProjectionFree(RiccatiSolution& rs, const WeierstrassForm& wf,
                        const AlgebraicSolution& alg) {
  if (wf.rank_1() > 0) {
    rs.lift = wf.E1.partialPivLu().solve(wf.coord_Z1);
  } else {
    rs.lift.resize(0, wf.coord_Z1.cols());
  }
  rs.Pi0 = alg.Pi0;
  rs.Pit0 = alg.Pit0;
}

RiccatiSolution SolveRiccati(const DescriptorSystem& sys,
                             const WeierstrassForm& wf, const SplitWeights& sw,
                             const QuadraticWeights& w, const TimeGrid& grid,
                             const DreOptions& opts) {
  const AlgebraicSolution alg = SolveAlgebraicPi0(sys, wf, sw, w);
  RiccatiSolution rs = SolveProjectedDre(wf, sw, grid, opts);
  LiftProjectionFree(rs, wf, alg);
  return rs;
}

DreResidual DreMidpointResidual(const RiccatiSolution& rs,
                                const WeierstrassForm& wf,
                                const SplitWeights& sw) {
  DreResidual out;
  if (wf.rank_1() == 0) return out;
  const Eigen::MatrixXd S = wf.Bt1 * sw.Rt.llt().solve(wf.Bt1.transpose());
  const TimeGrid& grid = rs.grid();
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = 0.5 * (grid[k] + grid[k + 1]);
    const Eigen::MatrixXd P = rs.Pi1.Evaluate(t);
    const Eigen::MatrixXd dP = rs.Pi1.Derivative(t);
    const Eigen::MatrixXd PA = P * wf.At1;
    const Eigen::MatrixXd PSP = P * S * P;
    const Eigen::MatrixXd res = dP + PA + PA.transpose() - PSP + sw.Q1;
    const double scale =
        dP.norm() + 2.0 * PA.norm() + PSP.norm() + sw.Q1.norm();
    const double v = scale > 0 ? res.norm() / scale : 0.0;
    if (v > out.max_scaled) {
      out.max_scaled = v;
      out.at_time = t;
    }
  }
  return out;
}

ProjectionFreeResidual MeasureProjectionFreeResidual(
    const RiccatiSolution& rs, const DescriptorSystem& sys,
    const QuadraticWeights& w, const WeierstrassForm& wf,
    const SplitWeights& sw, double t) {
  const TimeGrid& grid = rs.grid();
  if (!(t > grid.t0() && t < grid.tf())) {
    Throw(ErrorCode::kOutOfGrid,
          "projection-free residual needs an interior time, got " +
              Sci(t));
  }
  const Eigen::MatrixXd& E = sys.E();
  const Eigen::MatrixXd& A = sys.A();
  const Eigen::MatrixXd& B = sys.B();
  const Eigen::LLT<Eigen::MatrixXd> Rllt(w.R);
  const Eigen::MatrixXd P = rs.Pit1(t);
  const Eigen::MatrixXd dEPE = E.transpose() * rs.Pit1Derivative(t) * E;
  const Eigen::MatrixXd EPA = E.transpose() * P * A;
  const Eigen::MatrixXd EPB = E.transpose() * P * B;
  const Eigen::MatrixXd quad = EPB * Rllt.solve(B.transpose() * P * E);
  const Eigen::MatrixXd cross = EPB * Rllt.solve(B.transpose() * rs.Pit0);
  const Eigen::MatrixXd QP1 = w.Q * (wf.basis_X1 * wf.coord_X1);
  const Eigen::MatrixXd res =
      dEPE + EPA + EPA.transpose() - quad - cross + QP1;

  ProjectionFreeResidual out;
  out.scale = dEPE.norm() + 2.0 * EPA.norm() + quad.norm() + cross.norm() +
              QP1.norm();
  if (out.scale == 0.0) return out;
  out.full = res.norm() / out.scale;
  Eigen::MatrixXd Vm = wf.basis_X1;
  if (wf.rank_0() > 0 && wf.rank_1() > 0) {
    Vm += wf.basis_X0 * wf.Bt0 *
          sw.Rt.llt().solve(wf.Bt1.transpose() * rs.Pi1.Evaluate(t));
  }
  out.on_manifold = (res * Vm).norm() / out.scale;
  return out;
}

std::vector<Eigen::MatrixXd> PerturbGeneralSolution(
    const RiccatiSolution& rs, const SpectralProjectors& proj,
    const std::function<Eigen::MatrixXd(double)>& Z2,
    const std::function<Eigen::MatrixXd(double)>& Z4) {
  const Eigen::Index nz = proj.P_Z1.rows();
  const TimeGrid& grid = rs.grid();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Eigen::MatrixXd z2 = Z2(grid[k]);
    const Eigen::MatrixXd z4 = Z4(grid[k]);
    if (z2.rows() != nz || z2.cols() != nz || z4.rows() != nz ||
        z4.cols() != nz) {
      Throw(ErrorCode::kDimensionMismatch, "Z2 and Z4 must be n_z x n_z");
    }
    out.push_back(rs.Pit1Node(k) + proj.P_Z1.transpose() * z2 * proj.P_Z0 +
                  proj.P_Z0.transpose() * z4 * proj.P_Z0);
  }
  return out;
}

double MinimumCost(const RiccatiSolution& rs, const DescriptorSystem& sys,
                   const Eigen::VectorXd& x_i) {
  const Eigen::VectorXd Ex = sys.E() * x_i;
  return Ex.dot(rs.Pit1Node(0) * Ex);
}

double MinimumCostProjected(const RiccatiSolution& rs,
                            const WeierstrassForm& wf,
                            const Eigen::VectorXd& x_i) {
  const Eigen::VectorXd c = wf.coord_X1 * x_i;
  return c.dot(rs.Pi1.value(0) * c);
}

}  // namespace dlqr
