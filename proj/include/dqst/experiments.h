#pragma once

// Monte-Carlo error-scaling experiments: squared reconstruction error as a
// function of the shot count, averaged over independent seeds.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqst/dynamics.h"
#include "dqst/measurement.h"
#include "dqst/observability.h"
#include "dqst/reconstruct.h"
#include "dqst/selection.h"

namespace dqst {

/// One scheduled measurement: observable index into 𝒳 and time.
struct RowSpec {
  int observable = 0;
  double time = 0.0;
};

std::vector<RowSpec> PlanRows(const MeasurementPlan& plan);

struct ScalingSetup {
  std::vector<long long> shots;
  int n_seeds = 20;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kClt;
};

struct ScalingPoint {
  long long shots = 0;
  // Mean over seeds of the squared error.
  double mean_error = 0.0;
  // Sample standard deviation over seeds.
  double std_error = 0.0;
};

struct ScalingCurve {
  std::string name;
  std::vector<ScalingPoint> points;
  // Least-squares fit log₁₀ ε² = slope·log₁₀ N + intercept; left at 0 for
  // a single shot count.
  double slope = 0.0;
  double intercept = 0.0;
};

/// Fills slope and intercept from the points (needs ≥ 2 positive errors).
void FitLogLog(ScalingCurve& curve);

/// Born distributions of every row on ρ₀; reusable across seeds.
std::vector<OutcomeDistribution> RowDistributions(
    const Evolver& evolver, const MeasurementSet& X,
    const std::vector<RowSpec>& rows, const OperatorMatrix& rho0);

/// One simulated record: row j is sampled with seed
/// DeriveSeed(record_seed, j).
Eigen::VectorXd SimulateRecord(const std::vector<OutcomeDistribution>& dists,
                               long long shots, std::uint64_t record_seed,
                               SamplingMode mode);

/// ε²_ρ = tr[(ρ − ρ̂)†(ρ − ρ̂)] for linear-inversion estimates.
ScalingCurve StateErrorScaling(const std::string& name, const Evolver& evolver,
                               const MeasurementSet& X,
                               const std::vector<RowSpec>& rows,
                               const StateEstimator& estimator,
                               const OperatorMatrix& rho0,
                               const ScalingSetup& setup);

/// ε²_z = (tr(Zρ) − Σ α_j ŷ_j)² for a target estimated from `rows`.
ScalingCurve TargetErrorScaling(const std::string& name,
                                const Evolver& evolver,
                                const MeasurementSet& X,
                                const std::vector<RowSpec>& rows,
                                const Eigen::VectorXd& alpha,
                                const OperatorMatrix& Z,
                                const OperatorMatrix& rho0,
                                const ScalingSetup& setup);

}  // namespace dqst
