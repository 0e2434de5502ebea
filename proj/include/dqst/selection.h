#pragma once

// Greedy choice of which observable to measure next and when: each step
// maximizes the component of the evolved observable orthogonal to the span
// of everything already selected.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dqst/dynamics.h"
#include "dqst/linops.h"
#include "dqst/observability.h"

namespace dqst {

struct SelectionOptions {
  // Coarse grid points on [0, T], t = 0 included.
  int n_grid = 200;
  // Golden-section refinement stops at this fraction of T.
  double time_tol = 1e-6;
  // Objectives a, b tie unless they differ by more than
  // tie_tol·max(|a|, |b|).
  double tie_tol = 1e-10;
  // When set, the first non-identity observable is drawn uniformly with
  // this seed instead of taking the lowest index.
  std::optional<std::uint64_t> first_pick_seed;
  RankPolicy rank_policy;
};

struct TimeOptimum {
  double time = 0.0;
  double objective = 0.0;
};

/// Approximately maximizes f(t) = ‖Π⊥ e^{Lt} x‖² over [0, T]: the best grid
/// point (earliest on ties) is refined by golden-section search.
TimeOptimum OptimizeTime(const OperatorVector& x,
                         const Eigen::MatrixXcd& projector,
                         const Evolver& evolver, double horizon,
                         const SelectionOptions& options = {});

struct PlanEntry {
  int observable = 0;
  double time = 0.0;
  // e^{Lt}x_i.
  OperatorVector evolved;
  // ‖Π⊥ evolved‖² against the span of the preceding entries.
  double objective = 0.0;
  // Span rank after adding this entry.
  int cumulative_rank = 0;
};

struct MeasurementPlan {
  std::vector<PlanEntry> entries;
  double horizon = 0.0;
  int final_rank = 0;
  // dim 𝒪; the plan is complete when final_rank reaches it.
  int target_rank = 0;
  int dim = 0;

  bool complete() const { return final_rank == target_rank; }
  bool full_rank() const { return final_rank == dim * dim; }
};

/// 4/|Re λ₂| with λ₂ the slowest nonzero generator eigenvalue. Throws
/// InvalidInputError when the generator has no decaying mode.
double DefaultHorizon(const Superoperator& generator);

/// Greedy plan. The identity goes first at t = 0, then the first
/// non-identity observable at t = 0; every later step optimizes the time
/// for each observable and keeps the best (lowest index on ties). Stops
/// when the span reaches dim 𝒪 or the best objective is numerically zero.
MeasurementPlan GreedyPlan(const Superoperator& generator,
                           const MeasurementSet& X, double horizon,
                           const SelectionOptions& options = {});

}  // namespace dqst
