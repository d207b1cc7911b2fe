#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "dlqr/hermite.hpp"
#include "dlqr/time_grid.hpp"

namespace dlqr {

/// u(t) sampled on a grid; between nodes a C^1 cubic through the samples.
class ControlSignal {
 public:
  /// Throws Error(kGridMismatch) or Error(kDimensionMismatch) for ragged or
  /// non-finite samples.
  ControlSignal(TimeGrid grid, std::vector<Eigen::VectorXd> u);

  static ControlSignal Constant(const TimeGrid& grid, const Eigen::VectorXd& u);
  static ControlSignal Zero(const TimeGrid& grid, Eigen::Index n_u);

  const TimeGrid& grid() const { return interp_.grid(); }
  const std::vector<Eigen::VectorXd>& nodes() const { return u_; }
  const Eigen::VectorXd& node(std::size_t k) const { return u_[k]; }
  Eigen::Index n_u() const { return u_.front().size(); }
  Eigen::VectorXd operator()(double t) const;

  /// max over nodes of the infinity norm.
  double SupNorm() const;

 private:
  std::vector<Eigen::VectorXd> u_;
  HermiteSeries interp_;
};

/// max_k ||a_k - b_k||_inf; throws Error(kGridMismatch) on different grids.
double SupDistance(const ControlSignal& a, const ControlSignal& b);

/// State feedback u(t) = -K(t) x(t); K is n_u x n_x.
struct GainSchedule {
  HermiteSeries K;

  const TimeGrid& grid() const { return K.grid(); }
  Eigen::MatrixXd operator()(double t) const { return K.Evaluate(t); }
  const Eigen::MatrixXd& node(std::size_t k) const { return K.value(k); }
};

/// Simulated states and input at the nodes of the output grid.
struct Trajectory {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> x;    ///< ambient state
  std::vector<Eigen::VectorXd> x1c;  ///< X1 coordinates
  std::vector<Eigen::VectorXd> x0c;  ///< X0 coordinates
  std::vector<Eigen::VectorXd> u;
  double J = std::numeric_limits<double>::quiet_NaN();
  /// ||coord_X0 x_i + Bt0 u(0)||: how far the prescribed initial state is
  /// from the one the realized u(0) admits.
  double initial_admissibility_gap = 0.0;

  ControlSignal Control() const { return ControlSignal(grid, u); }
};

}  // namespace dlqr
