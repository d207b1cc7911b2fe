#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dlqr/time_grid.hpp"

namespace dlqr {

/// Piecewise cubic Hermite interpolant of a matrix-valued function sampled on
/// a TimeGrid, given values and time derivatives at every node. C^1 across
/// nodes; exact for cubics.
class HermiteSeries {
 public:
  HermiteSeries(TimeGrid grid, std::vector<Eigen::MatrixXd> values,
                std::vector<Eigen::MatrixXd> slopes);

  /// Slopes estimated from the values by second-order finite differences
  /// (three-point formulas on the possibly nonuniform grid).
  static HermiteSeries FromValues(TimeGrid grid,
                                  std::vector<Eigen::MatrixXd> values);

  const TimeGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& value(std::size_t k) const { return values_[k]; }
  const Eigen::MatrixXd& slope(std::size_t k) const { return slopes_[k]; }
  const std::vector<Eigen::MatrixXd>& values() const { return values_; }
  Eigen::Index rows() const { return values_.front().rows(); }
  Eigen::Index cols() const { return values_.front().cols(); }

  Eigen::MatrixXd Evaluate(double t) const;
  Eigen::MatrixXd Derivative(double t) const;

 private:
  TimeGrid grid_;
  std::vector<Eigen::MatrixXd> values_;
  std::vector<Eigen::MatrixXd> slopes_;
};

/// Three-point finite-difference derivative estimates at every node.
std::vector<Eigen::MatrixXd> FiniteDifferenceSlopes(
    const TimeGrid& grid, const std::vector<Eigen::MatrixXd>& values);

}  // namespace dlqr
