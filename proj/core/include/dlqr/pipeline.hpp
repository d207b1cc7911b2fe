#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "dlqr/control.hpp"
#include "dlqr/descriptor.hpp"
#include "dlqr/fem.hpp"
#include "dlqr/oracle.hpp"
#include "dlqr/riccati.hpp"
#include "dlqr/simulate.hpp"
#include "dlqr/weierstrass.hpp"

namespace dlqr {

struct Problem {
  std::string name;
  DescriptorSystem sys;
  QuadraticWeights weights;
  Eigen::VectorXd x_i;
  std::optional<ParabolicEllipticParams> fem;
};

/// E = diag(1, 0), A = diag(-1, -2), B = [1; 1], Q = diag(1, 0), R = 1,
/// G = 0, t_f = 6, x_i = (1, 0).
Problem ScalarProblem();

/// E = I, random stable A, random PSD Q and G, R = I.
Problem RandomLqrProblem(std::uint64_t seed, Eigen::Index n_x = 4,
                         Eigen::Index n_u = 2, double t_f = 2.0);

Problem ParabolicEllipticProblem(const ParabolicEllipticParams& p = {});

struct PipelineOptions {
  PencilOptions pencil;
  WeierstrassOptions weierstrass;
  double tol_weights = 1e-8;
  DreOptions dre;
  SimulationOptions sim{Bdf2Options{}, ConsistencyPolicy::kFromControl, 1e-9};
  std::size_t n_output_nodes = 601;
  /// Use the closed-form split for E = blockdiag(E11, 0) instead of QZ.
  bool semi_explicit = false;
  bool open_loop_reference = true;
  bool picard = false;
  PicardOptions picard_options;
  bool oracle = false;
  int oracle_steps = 400;
};

struct PipelineResult {
  PencilClass pencil;
  SpectralProjectors projectors;
  ProjectorResiduals projector_residuals;
  WeierstrassForm wf;
  CompatibilityReport compatibility;
  SplitWeights split;
  AlgebraicSolution algebraic;
  std::optional<TimeGrid> grid;
  std::optional<RiccatiSolution> riccati;
  std::optional<GainSchedule> gains;
  std::optional<Trajectory> closed_loop;
  std::optional<Trajectory> open_loop_zero;  ///< u = 0, when requested
  double J_feedback = 0.0;
  double J_min_formula = 0.0;
  double J_min_projected = 0.0;
  std::optional<PicardResult> picard;
  std::optional<OracleResult> oracle;
};

/// Pencil admission, projectors, Weierstrass form, weight split, Riccati,
/// feedback and closed-loop simulation, plus the optional cross-checks.
/// Propagates the library errors of each stage; incompatible weights raise
/// Error(kIncompatibleWeights).
PipelineResult RunPipeline(const Problem& problem,
                           const PipelineOptions& opts = {});

/// The structural stages only (through SplitWeights).
PipelineResult Prepare(const Problem& problem, const PipelineOptions& opts);

}  // namespace dlqr
