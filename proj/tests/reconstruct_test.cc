#include "dqst/reconstruct.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dqst/errors.h"
#include "dqst/experiments.h"
#include "test_util.h"

namespace dqst {
namespace {

using testing::RandomDensity;
using testing::RandomHermitianMatrix;
using testing::RandomLindblad;

struct Fixture {
  Superoperator generator;
  MeasurementSet X;
  MeasurementPlan plan;
};

Fixture ObservableQutrit(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Fixture s;
  s.generator = GeneratorMatrix(RandomLindblad(3, 1, rng));
  s.X = MeasurementSet::WithIdentity({RandomHermitianMatrix(3, rng)});
  s.plan = GreedyPlan(s.generator, s.X, DefaultHorizon(s.generator));
  return s;
}

Eigen::VectorXd ExactData(const MeasurementPlan& plan, const OperatorMatrix& rho) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(plan.entries.size()));
  for (std::size_t k = 0; k < plan.entries.size(); ++k) {
    // tr(Φ_t(X) ρ) with Φ_t(X) Hermitian.
    y(static_cast<Eigen::Index>(k)) =
        (Unvec(plan.entries[k].evolved) * rho).trace().real();
  }
  return y;
}

TEST(ReconstructTest, ExactDataRoundTrip) {
  for (std::uint64_t seed : {50u, 51u, 52u}) {
    const Fixture s = ObservableQutrit(seed);
    ASSERT_TRUE(s.plan.full_rank());
    std::mt19937_64 rng(seed + 100);
    const OperatorMatrix rho = RandomDensity(3, rng);
    const DesignMatrix O = BuildDesignMatrix(s.plan);
    EXPECT_EQ(O.rows.rows(), 9);
    const ReconstructionResult r = EstimateState(O, ExactData(s.plan, rho));
    EXPECT_LE((r.rho - rho).norm(), 1e-8);
    EXPECT_EQ(r.rank, 9);
    EXPECT_LE(r.residual_norm, 1e-10);
  }
}

TEST(ReconstructTest, ConditionNumberIsSquaredSingularValueRatio) {
  const Fixture s = ObservableQutrit(53);
  const DesignMatrix O = BuildDesignMatrix(s.plan);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(O.rows);
  const auto& sv = svd.singularValues();
  const double ratio = sv(0) / sv(sv.size() - 1);
  EXPECT_NEAR(StateEstimator(O).condition_number() / (ratio * ratio), 1.0, 1e-8);
}

TEST(ReconstructTest, RankDeficientDesignIsInfeasible) {
  LindbladGenerator gen;
  gen.hamiltonian = PauliMatrix('X');
  const MeasurementSet X = MeasurementSet::WithIdentity({PauliMatrix('Z')});
  const MeasurementPlan plan = GreedyPlan(GeneratorMatrix(gen), X, 1.0);
  try {
    StateEstimator estimator(BuildDesignMatrix(plan));
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.reason(), "rank_deficient_design");
    EXPECT_EQ(e.rank(), 3);
    EXPECT_EQ(e.required(), 4);
  }
}

TEST(ReconstructTest, MseBoundMatchesInverseGramTrace) {
  const Fixture s = ObservableQutrit(54);
  const DesignMatrix O = BuildDesignMatrix(s.plan);
  const Eigen::MatrixXcd gram = O.rows.adjoint() * O.rows;
  const double trace = gram.inverse().trace().real();
  EXPECT_NEAR(MseBound(O, 2.0, 50, {}) / (2.0 / 50.0 * trace), 1.0, 1e-8);
  // A uniform variance k turns the exact formula into the bound.
  const Eigen::VectorXd k = Eigen::VectorXd::Constant(O.rows.rows(), 2.0);
  EXPECT_NEAR(MseExact(O, k, 50) / MseBound(O, 2.0, 50), 1.0, 1e-8);
}

TEST(ReconstructTest, MseExactMatchesMonteCarlo) {
  LindbladGenerator gen;
  gen.hamiltonian = PauliMatrix('X') + PauliMatrix('Z');
  gen.noise_ops = {0.3 * PauliMatrix('Z')};
  const Superoperator L = GeneratorMatrix(gen);
  const MeasurementSet X = MeasurementSet::WithIdentity({PauliMatrix('Z')});
  const MeasurementPlan plan = GreedyPlan(L, X, DefaultHorizon(L));
  const DesignMatrix O = BuildDesignMatrix(plan);
  const StateEstimator estimator(O);
  const Evolver evolver(L);
  OperatorMatrix rho = OperatorMatrix::Zero(2, 2);
  rho(0, 0) = 0.8;
  rho(1, 1) = 0.2;
  rho(0, 1) = Complex(0.1, 0.2);
  rho(1, 0) = Complex(0.1, -0.2);
  const auto dists = RowDistributions(evolver, X, PlanRows(plan), rho);
  Eigen::VectorXd variances(static_cast<Eigen::Index>(dists.size()));
  for (std::size_t j = 0; j < dists.size(); ++j) {
    double m = 0.0, m2 = 0.0;
    for (std::size_t o = 0; o < dists[j].outcomes.size(); ++o) {
      m += dists[j].probabilities[o] * dists[j].outcomes[o];
      m2 += dists[j].probabilities[o] * dists[j].outcomes[o] * dists[j].outcomes[o];
    }
    variances(static_cast<Eigen::Index>(j)) = m2 - m * m;
  }
  const long long shots = 500;
  const int n = 4000;
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    const Eigen::VectorXd y = SimulateRecord(dists, shots, 9000 + s, SamplingMode::kClt);
    total += (estimator.Estimate(y).rho - rho).squaredNorm();
  }
  // ε² is a weighted sum of χ²₁ variables; 4000 draws give a few % spread.
  EXPECT_NEAR(total / n / MseExact(O, variances, shots), 1.0, 0.1);
}

TEST(ReconstructTest, ProjectionOntoDensityMatrices) {
  OperatorMatrix M = OperatorMatrix::Zero(2, 2);
  M(0, 0) = 1.2;
  M(1, 1) = -0.2;
  const OperatorMatrix P = ProjectToDensityMatrix(M);
  EXPECT_NEAR(P(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(P(1, 1)), 0.0, 1e-12);
  std::mt19937_64 rng(55);
  const OperatorMatrix rho = RandomDensity(4, rng);
  EXPECT_LE((ProjectToDensityMatrix(rho) - rho).norm(), 1e-12);
  const OperatorMatrix noisy = rho + 0.3 * RandomHermitianMatrix(4, rng);
  const OperatorMatrix q = ProjectToDensityMatrix(noisy);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(q);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  EXPECT_NEAR(q.trace().real(), 1.0, 1e-12);
}

TEST(ReconstructTest, PsdProjectionFlag) {
  const Fixture s = ObservableQutrit(56);
  ReconstructionOptions options;
  options.psd_project = true;
  OperatorMatrix pure = OperatorMatrix::Zero(3, 3);
  pure(0, 0) = 1.0;
  Eigen::VectorXd y = ExactData(s.plan, pure);
  y(1) += 0.05;
  const ReconstructionResult r =
      EstimateState(BuildDesignMatrix(s.plan), y, options);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r.rho);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-12);
}

TEST(ReconstructTest, TargetCoefficientsRecoverCombination) {
  const std::vector<OperatorVector> evolved = {
      Vec(PauliMatrix('X')), Vec(PauliMatrix('Y')), Vec(PauliMatrix('Z'))};
  const OperatorMatrix Z = 2.0 * PauliMatrix('X') - 3.0 * PauliMatrix('Z');
  const TargetCoefficients all = SolveTargetCoefficients(evolved, Z);
  ASSERT_EQ(all.alpha.size(), 3);
  EXPECT_NEAR(all.alpha(0), 2.0, 1e-12);
  EXPECT_NEAR(all.alpha(1), 0.0, 1e-12);
  EXPECT_NEAR(all.alpha(2), -3.0, 1e-12);
  const TargetCoefficients minimal = MinimalSupportCoefficients(evolved, Z);
  EXPECT_EQ(minimal.chosen, (std::vector<int>{2, 0}));
  EXPECT_NEAR(TargetEstimate(minimal.alpha, Eigen::Vector2d(0.5, 0.25)),
              minimal.alpha(0) * 0.5 + minimal.alpha(1) * 0.25, 1e-15);
}

TEST(ReconstructTest, TargetOutsideSpanIsInfeasible) {
  const std::vector<OperatorVector> evolved = {Vec(PauliMatrix('X'))};
  try {
    SolveTargetCoefficients(evolved, PauliMatrix('Z'));
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.reason(), "target_not_in_observable_subspace");
  }
  EXPECT_THROW(MinimalSupportCoefficients(evolved, PauliMatrix('Z')),
               InfeasibleError);
}

TEST(ReconstructTest, RejectsMismatchedData) {
  const Fixture s = ObservableQutrit(57);
  const DesignMatrix O = BuildDesignMatrix(s.plan);
  EXPECT_THROW(EstimateState(O, Eigen::VectorXd::Zero(3)), DimensionError);
}

}  // namespace
}  // namespace dqst
