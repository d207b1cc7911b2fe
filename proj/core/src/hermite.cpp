#include "dlqr/hermite.hpp"

#include "dlqr/errors.hpp"

namespace dlqr {

HermiteSeries::HermiteSeries(TimeGrid grid, std::vector<Eigen::MatrixXd> values,
                             std::vector<Eigen::MatrixXd> slopes)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      slopes_(std::move(slopes)) {
  if (values_.size() != grid_.size() || slopes_.size() != grid_.size()) {
    Throw(ErrorCode::kGridMismatch,
          "Hermite data must have one value and one slope per node");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k].rows() != values_[0].rows() ||
        values_[k].cols() != values_[0].cols() ||
        slopes_[k].rows() != values_[0].rows() ||
        slopes_[k].cols() != values_[0].cols()) {
      Throw(ErrorCode::kDimensionMismatch,
            "Hermite samples must share one shape");
    }
  }
}

HermiteSeries HermiteSeries::FromValues(TimeGrid grid,
                                        std::vector<Eigen::MatrixXd> values) {
  auto slopes = FiniteDifferenceSlopes(grid, values);
  return HermiteSeries(std::move(grid), std::move(values), std::move(slopes));
}

Eigen::MatrixXd HermiteSeries::Evaluate(double t) const {
  const std::size_t k = grid_.Locate(t);
  const double t0 = grid_[k];
  const double h = grid_[k + 1] - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * values_[k] + (h10 * h) * slopes_[k] + h01 * values_[k + 1] +
         (h11 * h) * slopes_[k + 1];
}

Eigen::MatrixXd HermiteSeries::Derivative(double t) const {
  const std::size_t k = grid_.Locate(t);
  const double t0 = grid_[k];
  const double h = grid_[k + 1] - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double d00 = (6 * s2 - 6 * s) / h;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = (-6 * s2 + 6 * s) / h;
  const double d11 = 3 * s2 - 2 * s;
  return d00 * values_[k] + d10 * slopes_[k] + d01 * values_[k + 1] +
         d11 * slopes_[k + 1];
}

std::vector<Eigen::MatrixXd> FiniteDifferenceSlopes(
    const TimeGrid& grid, const std::vector<Eigen::MatrixXd>& values) {
  const std::size_t n = grid.size();
  if (values.size() != n) {
    Throw(ErrorCode::kGridMismatch, "one value per node required");
  }
  std::vector<Eigen::MatrixXd> slopes(n);
  if (n == 2) {
    const Eigen::MatrixXd d = (values[1] - values[0]) / (grid[1] - grid[0]);
    slopes[0] = d;
    slopes[1] = d;
    return slopes;
  }
  // Derivative of the quadratic through (t_a, t_b, t_c) evaluated at t.
  auto quad = [&](std::size_t a, std::size_t b, std::size_t c, double t) {
    const double ta = grid[a], tb = grid[b], tc = grid[c];
    const double wa = (2 * t - tb - tc) / ((ta - tb) * (ta - tc));
    const double wb = (2 * t - ta - tc) / ((tb - ta) * (tb - tc));
    const double wc = (2 * t - ta - tb) / ((tc - ta) * (tc - tb));
    return Eigen::MatrixXd(wa * values[a] + wb * values[b] + wc * values[c]);
  };
  slopes[0] = quad(0, 1, 2, grid[0]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    slopes[k] = quad(k - 1, k, k + 1, grid[k]);
  }
  slopes[n - 1] = quad(n - 3, n - 2, n - 1, grid[n - 1]);
  return slopes;
}

}  // namespace dlqr
