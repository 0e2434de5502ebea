#include "dqst/experiments.h"

#include <cmath>

#include "dqst/errors.h"
#include "dqst/random.h"

namespace dqst {
namespace {

std::uint64_t RecordSeed(const ScalingSetup& setup, std::size_t point,
                         int repeat) {
  return DeriveSeed(setup.seed,
                    static_cast<std::uint64_t>(point) * setup.n_seeds + repeat);
}

void RequireSetup(const ScalingSetup& setup) {
  if (setup.shots.empty()) throw InvalidInputError("no shot counts given");
  if (setup.n_seeds < 1) throw InvalidInputError("n_seeds must be >= 1");
  for (long long n : setup.shots) {
    if (n < 1) throw InvalidInputError("shot counts must be >= 1");
  }
}

template <typename ErrorFn>
ScalingCurve Scan(const std::string& name, const ScalingSetup& setup,
                  const std::vector<OutcomeDistribution>& dists,
                  ErrorFn&& error_of) {
  RequireSetup(setup);
  ScalingCurve curve;
  curve.name = name;
  for (std::size_t p = 0; p < setup.shots.size(); ++p) {
    std::vector<double> errors;
    for (int s = 0; s < setup.n_seeds; ++s) {
      const Eigen::VectorXd y = SimulateRecord(
          dists, setup.shots[p], RecordSeed(setup, p, s), setup.mode);
      errors.push_back(error_of(y));
    }
    ScalingPoint point;
    point.shots = setup.shots[p];
    for (double e : errors) point.mean_error += e;
    point.mean_error /= static_cast<double>(errors.size());
    if (errors.size() > 1) {
      double var = 0.0;
      for (double e : errors) var += (e - point.mean_error) * (e - point.mean_error);
      point.std_error = std::sqrt(var / static_cast<double>(errors.size() - 1));
    }
    curve.points.push_back(point);
  }
  if (curve.points.size() >= 2) FitLogLog(curve);
  return curve;
}

}  // namespace

std::vector<RowSpec> PlanRows(const MeasurementPlan& plan) {
  std::vector<RowSpec> rows;
  for (const auto& e : plan.entries) rows.push_back({e.observable, e.time});
  return rows;
}

void FitLogLog(ScalingCurve& curve) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& p : curve.points) {
    if (!(p.mean_error > 0.0) || p.shots < 1) continue;
    const double x = std::log10(static_cast<double>(p.shots));
    const double y = std::log10(p.mean_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw NumericalError("log-log fit needs two positive points");
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw NumericalError("log-log fit needs distinct N");
  curve.slope = (n * sxy - sx * sy) / denom;
  curve.intercept = (sy - curve.slope * sx) / n;
}

std::vector<OutcomeDistribution> RowDistributions(
    const Evolver& evolver, const MeasurementSet& X,
    const std::vector<RowSpec>& rows, const OperatorMatrix& rho0) {
  std::vector<OutcomeDistribution> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back(EvolvedDistribution(evolver, X.observable(r.observable),
                                      r.time, rho0));
  }
  return out;
}

Eigen::VectorXd SimulateRecord(const std::vector<OutcomeDistribution>& dists,
                               long long shots, std::uint64_t record_seed,
                               SamplingMode mode) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(dists.size()));
  for (std::size_t j = 0; j < dists.size(); ++j) {
    y(static_cast<Eigen::Index>(j)) =
        SampleFromDistribution(dists[j].outcomes, dists[j].probabilities, shots,
                               DeriveSeed(record_seed, j), mode)
            .value;
  }
  return y;
}

ScalingCurve StateErrorScaling(const std::string& name, const Evolver& evolver,
                               const MeasurementSet& X,
                               const std::vector<RowSpec>& rows,
                               const StateEstimator& estimator,
                               const OperatorMatrix& rho0,
                               const ScalingSetup& setup) {
  const auto dists = RowDistributions(evolver, X, rows, rho0);
  return Scan(name, setup, dists, [&](const Eigen::VectorXd& y) {
    return (estimator.Estimate(y).rho - rho0).squaredNorm();
  });
}

ScalingCurve TargetErrorScaling(const std::string& name,
                                const Evolver& evolver,
                                const MeasurementSet& X,
                                const std::vector<RowSpec>& rows,
                                const Eigen::VectorXd& alpha,
                                const OperatorMatrix& Z,
                                const OperatorMatrix& rho0,
                                const ScalingSetup& setup) {
  if (alpha.size() != static_cast<Eigen::Index>(rows.size())) {
    throw DimensionError("coefficient count does not match rows");
  }
  const double z = (Z * rho0).trace().real();
  const auto dists = RowDistributions(evolver, X, rows, rho0);
  return Scan(name, setup, dists, [&](const Eigen::VectorXd& y) {
    const double diff = z - TargetEstimate(alpha, y);
    return diff * diff;
  });
}

}  // namespace dqst
