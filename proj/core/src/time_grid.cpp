#include "dlqr/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlqr/errors.hpp"

namespace dlqr {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) {
    Throw(ErrorCode::kDimensionMismatch, "time grid needs at least two nodes");
  }
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    if (!(nodes_[k + 1] > nodes_[k]) || !std::isfinite(nodes_[k + 1])) {
      Throw(ErrorCode::kDimensionMismatch,
            "time grid nodes must be finite and strictly increasing (node " +
                std::to_string(k + 1) + ")");
    }
  }
}

TimeGrid TimeGrid::Uniform(double t0, double t_f, std::size_t n_nodes) {
  if (n_nodes < 2 || !(t_f > t0)) {
    Throw(ErrorCode::kDimensionMismatch,
          "uniform grid needs t_f > t0 and at least two nodes");
  }
  std::vector<double> nodes(n_nodes);
  const double h = (t_f - t0) / static_cast<double>(n_nodes - 1);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    nodes[k] = t0 + h * static_cast<double>(k);
  }
  nodes.back() = t_f;
  return TimeGrid(std::move(nodes));
}

bool TimeGrid::IsUniform(double rel_tol) const {
  const double h = (tf() - t0()) / static_cast<double>(size() - 1);
  for (std::size_t k = 0; k + 1 < size(); ++k) {
    if (std::abs(nodes_[k + 1] - nodes_[k] - h) > rel_tol * h * 10.0) {
      return false;
    }
  }
  return true;
}

std::size_t TimeGrid::Locate(double t) const {
  const double margin = 1e-12 * std::max(1.0, std::abs(tf() - t0()));
  if (t < t0() - margin || t > tf() + margin) {
    Throw(ErrorCode::kOutOfGrid, "time " + Sci(t) +
                                     " outside grid [" + Sci(t0()) +
                                     ", " + Sci(tf()) + "]");
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = it == nodes_.begin()
                      ? 0
                      : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(k, nodes_.size() - 2);
}

std::optional<std::size_t> TimeGrid::IndexOf(double t, double tol) const {
  const double scale = std::max(1.0, std::abs(tf() - t0()));
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol * scale);
  if (it != nodes_.end() && std::abs(*it - t) <= tol * scale) {
    return static_cast<std::size_t>(it - nodes_.begin());
  }
  return std::nullopt;
}

TimeGrid TimeGrid::Tail(double t_start) const {
  const double scale = std::max(1.0, std::abs(tf() - t0()));
  if (t_start < t0() - 1e-12 * scale || t_start >= tf()) {
    Throw(ErrorCode::kOutOfGrid, "tail start must lie in [t0, t_f)");
  }
  std::vector<double> nodes{t_start};
  for (double t : nodes_) {
    if (t > t_start + 1e-12 * scale) nodes.push_back(t);
  }
  return TimeGrid(std::move(nodes));
}

bool TimeGrid::SameAs(const TimeGrid& other, double tol) const {
  if (other.size() != size()) return false;
  const double scale = std::max(1.0, std::abs(tf() - t0()));
  for (std::size_t k = 0; k < size(); ++k) {
    if (std::abs(nodes_[k] - other.nodes_[k]) > tol * scale) return false;
  }
  return true;
}

}  // namespace dlqr
