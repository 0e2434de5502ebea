#include "dqst/experiments.h"

#include <cmath>

#include <gtest/gtest.h>

#include "dqst/errors.h"
#include "dqst/models.h"

namespace dqst {
namespace {

struct QubitSetup {
  Superoperator generator;
  MeasurementSet X;
  MeasurementPlan plan;
};

QubitSetup DampedQubit() {
  LindbladGenerator gen;
  gen.hamiltonian = PauliMatrix('X') + PauliMatrix('Z');
  OperatorMatrix lower = OperatorMatrix::Zero(2, 2);
  lower(0, 1) = 0.5;
  gen.noise_ops = {lower};
  QubitSetup s;
  s.generator = GeneratorMatrix(gen);
  s.X = MeasurementSet::WithIdentity({PauliMatrix('Z')}, {"Z"});
  s.plan = GreedyPlan(s.generator, s.X, DefaultHorizon(s.generator));
  return s;
}

TEST(ExperimentsTest, FitLogLogRecoversPowerLaw) {
  ScalingCurve curve;
  for (long long n : {100LL, 1000LL, 10000LL}) {
    curve.points.push_back({n, 3.0 / static_cast<double>(n), 0.0});
  }
  FitLogLog(curve);
  EXPECT_NEAR(curve.slope, -1.0, 1e-12);
  EXPECT_NEAR(curve.intercept, std::log10(3.0), 1e-12);
  ScalingCurve single;
  single.points.push_back({100, 1.0, 0.0});
  EXPECT_THROW(FitLogLog(single), NumericalError);
}

TEST(ExperimentsTest, PlanRowsFollowPlan) {
  const QubitSetup s = DampedQubit();
  ASSERT_TRUE(s.plan.full_rank());
  const std::vector<RowSpec> rows = PlanRows(s.plan);
  ASSERT_EQ(rows.size(), s.plan.entries.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].observable, s.plan.entries[k].observable);
    EXPECT_EQ(rows[k].time, s.plan.entries[k].time);
  }
}

TEST(ExperimentsTest, StateErrorMatchesExactMse) {
  const QubitSetup s = DampedQubit();
  const std::vector<RowSpec> rows = PlanRows(s.plan);
  const Evolver evolver(s.generator);
  const DesignMatrix O = BuildDesignMatrix(s.plan);
  const StateEstimator estimator(O);
  const OperatorMatrix rho0 = ProductZeroState(1);

  Eigen::VectorXd variances(static_cast<Eigen::Index>(rows.size()));
  const auto dists = RowDistributions(evolver, s.X, rows, rho0);
  for (std::size_t j = 0; j < dists.size(); ++j) {
    double mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < dists[j].outcomes.size(); ++k) {
      mean += dists[j].probabilities[k] * dists[j].outcomes[k];
      second += dists[j].probabilities[k] * dists[j].outcomes[k] *
                dists[j].outcomes[k];
    }
    variances(static_cast<Eigen::Index>(j)) = second - mean * mean;
  }

  ScalingSetup setup;
  setup.shots = {1000};
  setup.n_seeds = 2000;
  setup.seed = 7;
  const ScalingCurve curve =
      StateErrorScaling("zero", evolver, s.X, rows, estimator, rho0, setup);
  ASSERT_EQ(curve.points.size(), 1u);
  const double exact = MseExact(O, variances, 1000);
  // Relative standard error of a mean of 2000 χ²-like draws is a few percent.
  EXPECT_NEAR(curve.points[0].mean_error / exact, 1.0, 0.1);
}

TEST(ExperimentsTest, ScalingIsDeterministicAndInverseInShots) {
  const QubitSetup s = DampedQubit();
  const std::vector<RowSpec> rows = PlanRows(s.plan);
  const Evolver evolver(s.generator);
  const StateEstimator estimator(BuildDesignMatrix(s.plan));
  ScalingSetup setup;
  setup.shots = {100, 1000, 10000, 100000};
  setup.n_seeds = 20;
  setup.seed = 11;
  for (SamplingMode mode : {SamplingMode::kClt, SamplingMode::kExact}) {
    setup.mode = mode;
    const ScalingCurve a = StateErrorScaling("ghz", evolver, s.X, rows,
                                             estimator, GhzState(1), setup);
    const ScalingCurve b = StateErrorScaling("ghz", evolver, s.X, rows,
                                             estimator, GhzState(1), setup);
    ASSERT_EQ(a.points.size(), 4u);
    for (std::size_t k = 0; k < a.points.size(); ++k) {
      EXPECT_EQ(a.points[k].mean_error, b.points[k].mean_error);
    }
    EXPECT_NEAR(a.slope, -1.0, 0.2);
  }
}

TEST(ExperimentsTest, TargetErrorOfExactRowIsZeroMean) {
  const QubitSetup s = DampedQubit();
  const Evolver evolver(s.generator);
  // Z = σz measured directly at t = 0: α = 1 on that single row.
  const std::vector<RowSpec> rows = {{1, 0.0}};
  Eigen::VectorXd alpha(1);
  alpha << 1.0;
  ScalingSetup setup;
  setup.shots = {100, 10000};
  setup.n_seeds = 400;
  setup.seed = 3;
  const OperatorMatrix rho0 = GibbsState(PauliMatrix('X'), 0.7);
  const ScalingCurve curve = TargetErrorScaling(
      "z", evolver, s.X, rows, alpha, PauliMatrix('Z'), rho0, setup);
  const double mean_z = (PauliMatrix('Z') * rho0).trace().real();
  const double var = 1.0 - mean_z * mean_z;
  EXPECT_NEAR(curve.points[0].mean_error / (var / 100.0), 1.0, 0.2);
  EXPECT_NEAR(curve.points[1].mean_error / (var / 10000.0), 1.0, 0.2);
}

}  // namespace
}  // namespace dqst
