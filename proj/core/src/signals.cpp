#include "dlqr/signals.hpp"

#include <algorithm>

#include "dlqr/errors.hpp"

namespace dlqr {
namespace {

std::vector<Eigen::MatrixXd> AsMatrices(const std::vector<Eigen::VectorXd>& u) {
  return {u.begin(), u.end()};
}

}  // namespace

ControlSignal::ControlSignal(TimeGrid grid, std::vector<Eigen::VectorXd> u)
    : u_(std::move(u)),
      interp_(HermiteSeries::FromValues(std::move(grid), AsMatrices(u_))) {
  for (const auto& v : u_) {
    if (v.size() != u_.front().size()) {
      Throw(ErrorCode::kDimensionMismatch, "control samples differ in size");
    }
    if (!v.allFinite()) {
      Throw(ErrorCode::kDimensionMismatch, "control has non-finite samples");
    }
  }
}

ControlSignal ControlSignal::Constant(const TimeGrid& grid,
                                      const Eigen::VectorXd& u) {
  return ControlSignal(grid, std::vector<Eigen::VectorXd>(grid.size(), u));
}

ControlSignal ControlSignal::Zero(const TimeGrid& grid, Eigen::Index n_u) {
  return Constant(grid, Eigen::VectorXd::Zero(n_u));
}

Eigen::VectorXd ControlSignal::operator()(double t) const {
  return interp_.Evaluate(t);
}

double ControlSignal::SupNorm() const {
  double m = 0.0;
  for (const auto& v : u_) {
    if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

double SupDistance(const ControlSignal& a, const ControlSignal& b) {
  if (!a.grid().SameAs(b.grid()) || a.n_u() != b.n_u()) {
    Throw(ErrorCode::kGridMismatch, "controls live on different grids");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.nodes().size(); ++k) {
    const Eigen::VectorXd d = a.node(k) - b.node(k);
    if (d.size()) m = std::max(m, d.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace dlqr
