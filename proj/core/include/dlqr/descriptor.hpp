#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dlqr {

/// The descriptor system d/dt(E x) = A x + B u at fixed finite dimension.
/// E, A are n_z x n_x; B is n_z x n_u.
class DescriptorSystem {
 public:
  /// Throws Error(kDimensionMismatch) for inconsistent shapes or non-finite
  /// entries.
  DescriptorSystem(Eigen::MatrixXd E, Eigen::MatrixXd A, Eigen::MatrixXd B);

  const Eigen::MatrixXd& E() const { return E_; }
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  Eigen::Index n_x() const { return E_.cols(); }
  Eigen::Index n_z() const { return E_.rows(); }
  Eigen::Index n_u() const { return B_.cols(); }

 private:
  Eigen::MatrixXd E_, A_, B_;
};

struct PencilOptions {
  /// Singular values below rank_tol * ||.|| count as zero.
  double rank_tol = 1e-10;
  double tol_proj = 1e-8;
  double cond_max = 1e12;
  std::uint64_t seed = 0x5EED;
  int n_probes = 3;
};

struct PencilDiagnostics {
  double rank_threshold = 0.0;
  double norm_E = 0.0;
  double norm_A = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> probe_lambdas;
  /// sigma_min(lambda E - A) / (|lambda| ||E|| + ||A||) per probe.
  std::vector<double> probe_sigma_ratios;
  /// sigma_min(U^T A N) / ||A|| with N = ker E, U = coker E; the distance of
  /// the pencil from higher index (1 when E is invertible).
  double coupling_sigma_ratio = 1.0;
};

inline constexpr int kHigherIndexSentinel = 2;

struct PencilClass {
  bool regular = false;
  /// 0: radial with degree 0 (E invertible, or semi-simple infinite
  /// eigenvalues); kHigherIndexSentinel otherwise.
  int index_estimate = kHigherIndexSentinel;
  int finite_spectrum_count = 0;
  int infinite_eigenvalue_count = 0;
  PencilDiagnostics condition_report;
};

/// Classifies the pencil lambda E - A without throwing on the outcome.
/// Throws Error(kNonSquare) only.
PencilClass ClassifyPencil(const DescriptorSystem& sys,
                           const PencilOptions& opts = {});

/// Admission gate: returns the classification of a regular index-0 pencil.
/// Throws Error(kNonSquare), Error(kSingularPencil) or Error(kHigherIndex).
PencilClass ValidatePencil(const DescriptorSystem& sys,
                           const PencilOptions& opts = {});

/// Spectral projectors separating the finite (X1, Z1) from the infinite
/// (X0, Z0) deflating subspaces. Adjoints are transposes.
struct SpectralProjectors {
  Eigen::MatrixXd P_X1, P_X0, P_Z1, P_Z0;
  Eigen::Index rank_1 = 0;
};

struct ProjectorResiduals {
  double idempotency = 0.0;   ///< max ||P^2 - P|| over the four projectors
  double commutation_E = 0.0; ///< ||P_Z1 E - E P_X1|| / ||E||
  double commutation_A = 0.0; ///< ||P_Z1 A - A P_X1|| / ||A||
  double max() const;
};

ProjectorResiduals MeasureProjectors(const DescriptorSystem& sys,
                                     const SpectralProjectors& proj);

/// Ordered QZ of (A, E) with the finite eigenvalues leading, followed by the
/// block-decoupling generalized Sylvester solve. Propagates ValidatePencil
/// errors; throws Error(kProjectionFailure) when reordering or decoupling
/// fails, is ill-conditioned beyond cond_max, or the result misses the
/// projector invariants by more than tol_proj.
SpectralProjectors ComputeProjectors(const DescriptorSystem& sys,
                                     const PencilOptions& opts = {});

/// Builds projectors from P_X1 and P_Z1 (complements set to I - P).
SpectralProjectors MakeProjectors(Eigen::MatrixXd P_X1, Eigen::MatrixXd P_Z1);

}  // namespace dlqr
