#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dlqr {

/// Strictly increasing sample times on [t0, t_f], both endpoints included.
class TimeGrid {
 public:
  /// Throws Error(kDimensionMismatch) if fewer than two nodes are given or the
  /// nodes are not strictly increasing.
  explicit TimeGrid(std::vector<double> nodes);

  static TimeGrid Uniform(double t0, double t_f, std::size_t n_nodes);

  std::size_t size() const { return nodes_.size(); }
  double t0() const { return nodes_.front(); }
  double tf() const { return nodes_.back(); }
  double operator[](std::size_t k) const { return nodes_[k]; }
  std::span<const double> nodes() const { return nodes_; }
  bool IsUniform(double rel_tol = 1e-12) const;

  /// Index k of the interval [t_k, t_{k+1}] containing t (clamped to the
  /// grid). Throws Error(kOutOfGrid) when t lies outside [t0, t_f] by more
  /// than a rounding margin.
  std::size_t Locate(double t) const;

  /// Node index whose time matches t to within tol, if any.
  std::optional<std::size_t> IndexOf(double t, double tol = 1e-12) const;

  /// The grid restricted to [t_start, t_f]; t_start becomes the first node
  /// (nodes closer than 1e-12 relative to t_start are merged into it).
  TimeGrid Tail(double t_start) const;

  bool SameAs(const TimeGrid& other, double tol = 1e-12) const;

 private:
  std::vector<double> nodes_;
};

}  // namespace dlqr
