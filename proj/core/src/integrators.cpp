#include "dlqr/integrators.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "dlqr/errors.hpp"

namespace dlqr {
namespace {

class Corrector {
 public:
  Corrector(const OdeSystem& ode, const Bdf2Options& opts, Bdf2Stats& stats)
      : ode_(ode), opts_(opts), stats_(stats) {}

  // Solves y - beta f(t, y) = rhs starting from y_pred.
  Eigen::VectorXd Solve(double t, double beta, const Eigen::VectorXd& rhs,
                        Eigen::VectorXd y) {
    bool fresh = false;
    if (!jac_) {
      Refresh(t, y, beta);
      fresh = true;
    } else if (std::abs(beta - beta_) > 1e-13 * std::abs(beta)) {
      Factor(beta);
    }
    for (;;) {
      double prev = INFINITY;
      bool ok = false;
      for (int it = 0; it < opts_.max_newton_iter; ++it) {
        const Eigen::VectorXd g = y - beta * ode_.rhs(t, y) - rhs;
        const Eigen::VectorXd dy = lu_.solve(g);
        y -= dy;
        ++stats_.newton_iterations;
        const double nd = dy.norm();
        if (!std::isfinite(nd)) break;
        if (nd <= opts_.newton_tol * (1.0 + y.norm())) {
          ok = true;
          break;
        }
        if (it > 0 && nd > opts_.slow_rate * prev) break;
        prev = nd;
      }
      if (ok) return y;
      if (fresh) {
        Throw(ErrorCode::kNewtonFailure,
              "BDF corrector failed to converge at t = " + Sci(t));
      }
      Refresh(t, y, beta);
      fresh = true;
    }
  }

 private:
  void Refresh(double t, const Eigen::VectorXd& y, double beta) {
    jac_ = ode_.jacobian(t, y);
    ++stats_.jacobian_evaluations;
    Factor(beta);
  }
  void Factor(double beta) {
    beta_ = beta;
    const Eigen::Index n = jac_->rows();
    lu_.compute(Eigen::MatrixXd::Identity(n, n) - beta * (*jac_));
    ++stats_.factorizations;
  }

  const OdeSystem& ode_;
  const Bdf2Options& opts_;
  Bdf2Stats& stats_;
  std::optional<Eigen::MatrixXd> jac_;
  double beta_ = 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

std::vector<Eigen::VectorXd> IntegrateBdf2(const OdeSystem& ode,
                                           const TimeGrid& grid,
                                           const Eigen::VectorXd& y_start,
                                           Direction dir,
                                           const Bdf2Options& opts,
                                           Bdf2Stats* stats) {
  if (opts.substeps < 1) {
    Throw(ErrorCode::kConfig, "substeps must be at least 1");
  }
  Bdf2Stats local;
  Bdf2Stats& st = stats ? *stats : local;
  const std::size_t n_nodes = grid.size();
  const bool fwd = dir == Direction::kForward;
  auto node = [&](std::size_t k) { return grid[fwd ? k : n_nodes - 1 - k]; };

  std::vector<Eigen::VectorXd> out(n_nodes);
  out[fwd ? 0 : n_nodes - 1] = y_start;
  Corrector corr(ode, opts, st);

  Eigen::VectorXd y = y_start;
  Eigen::VectorXd y_prev;
  double t = node(0);
  double h_prev = 0.0;
  for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
    const double a = node(k);
    const double b = node(k + 1);
    for (int s = 1; s <= opts.substeps; ++s) {
      const double t_next =
          s == opts.substeps ? b : a + (b - a) * s / opts.substeps;
      const double h = t_next - t;
      Eigen::VectorXd y_next;
      if (h_prev == 0.0) {
        // Richardson-extrapolated implicit Euler: second order, L-stable.
        const Eigen::VectorXd full = corr.Solve(t_next, h, y, y);
        const Eigen::VectorXd half =
            corr.Solve(t + 0.5 * h, 0.5 * h, y, y);
        const Eigen::VectorXd half2 = corr.Solve(t_next, 0.5 * h, half, half);
        y_next = 2.0 * half2 - full;
      } else {
        const double w = h / h_prev;
        const double a1 = (1.0 + w) * (1.0 + w) / (1.0 + 2.0 * w);
        const double a2 = w * w / (1.0 + 2.0 * w);
        const double beta = h * (1.0 + w) / (1.0 + 2.0 * w);
        const Eigen::VectorXd pred = y + w * (y - y_prev);
        y_next = corr.Solve(t_next, beta, a1 * y - a2 * y_prev, pred);
      }
      ++st.steps;
      y_prev = std::move(y);
      y = std::move(y_next);
      h_prev = h;
      t = t_next;
    }
    out[fwd ? k + 1 : n_nodes - 2 - k] = y;
  }
  return out;
}

}  // namespace dlqr
