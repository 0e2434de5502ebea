#include "dqst/observability.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dqst/errors.h"
#include "dqst/models.h"
#include "test_util.h"

namespace dqst {
namespace {

using testing::RandomHermitianMatrix;
using testing::RandomLindblad;

Superoperator Hamiltonian(const OperatorMatrix& H) {
  LindbladGenerator gen;
  gen.hamiltonian = H;
  return GeneratorMatrix(gen);
}

MeasurementSet IdentityAndZ() {
  return MeasurementSet::WithIdentity({PauliMatrix('Z')}, {"Z"});
}

TEST(MeasurementSetTest, ValidatesContents) {
  const MeasurementSet X = IdentityAndZ();
  EXPECT_EQ(X.size(), 2);
  EXPECT_EQ(X.label(0), "I");
  EXPECT_EQ(X.identity_index(), 0);
  EXPECT_THROW(MeasurementSet::Create({PauliMatrix('Z')}), InvalidInputError);
  OperatorMatrix bad = OperatorMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  EXPECT_THROW(MeasurementSet::WithIdentity({bad}), InvalidInputError);
  EXPECT_THROW(MeasurementSet::WithIdentity({PauliMatrix('Z'), 2.0 * PauliMatrix('Z')}),
               InvalidInputError);
  const MeasurementSet unnamed =
      MeasurementSet::Create({OperatorMatrix::Identity(2, 2), PauliMatrix('X')});
  EXPECT_EQ(unnamed.label(1), "X1");
  // Any nonzero multiple of the identity counts.
  const MeasurementSet scaled =
      MeasurementSet::Create({PauliMatrix('X'), 3.0 * OperatorMatrix::Identity(2, 2)});
  EXPECT_EQ(scaled.identity_index(), 1);
}

TEST(ObservabilityTest, PauliXHamiltonianWithZ) {
  const Superoperator L = Hamiltonian(PauliMatrix('X'));
  const ObservabilityReport r = KalmanReport(L, IdentityAndZ());
  EXPECT_EQ(r.rank, 3);
  EXPECT_EQ(r.d2, 4);
  EXPECT_FALSE(r.observable);
  ASSERT_EQ(r.non_obs_basis.cols(), 1);
  // i[σx, σz] = 2σy and i[σx, σy] = −2σz, so 𝒩 = span{σx}.
  const OperatorVector n = Vec(PauliMatrix('X')) / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(n.dot(r.non_obs_basis.col(0))), 1.0, 1e-12);
  EXPECT_TRUE(r.hermitian_non_obs_basis);
  EXPECT_FALSE(PbhTest(L, IdentityAndZ()).observable);
}

TEST(ObservabilityTest, NonObservableSubspaceIsTracelessAndHermitian) {
  const ModelSystem m = SpinChain(SpinChainParams::Uniform(3, 1.0, 0.0));
  const ObservabilityReport r =
      KalmanReport(GeneratorMatrix(m.generator), m.measurements);
  ASSERT_GT(r.n_nonobs(), 0);
  const int d = m.measurements.dim();
  for (Eigen::Index k = 0; k < r.non_obs_basis.cols(); ++k) {
    const OperatorMatrix N = Unvec(r.non_obs_basis.col(k), d);
    EXPECT_LE(std::abs(N.trace()), 1e-10);
    if (r.hermitian_non_obs_basis) EXPECT_LE(HermiticityDeviation(N), 1e-10);
  }
  EXPECT_LE((r.obs_basis.adjoint() * r.non_obs_basis).norm(), 1e-10);
  EXPECT_EQ(r.obs_basis.cols() + r.non_obs_basis.cols(), r.d2);
}

TEST(ObservabilityTest, KalmanAgreesWithPbh) {
  std::mt19937_64 rng(20);
  int observable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 3;
    Superoperator L;
    MeasurementSet X;
    switch (trial % 4) {
      case 0: {  // generic open system
        L = GeneratorMatrix(RandomLindblad(d, 1, rng));
        X = MeasurementSet::WithIdentity({RandomHermitianMatrix(d, rng)});
        break;
      }
      case 1: {  // observable commuting with H: confined to the commutant
        const OperatorMatrix H = RandomHermitianMatrix(d, rng);
        L = Hamiltonian(H);
        X = MeasurementSet::WithIdentity({H * H});
        break;
      }
      case 2: {  // unitary with too few observables
        L = Hamiltonian(RandomHermitianMatrix(d, rng));
        X = MeasurementSet::WithIdentity({RandomHermitianMatrix(d, rng)});
        break;
      }
      default: {  // unitary with d observables
        L = Hamiltonian(RandomHermitianMatrix(d, rng));
        std::vector<OperatorMatrix> obs;
        for (int k = 1; k < d; ++k) obs.push_back(RandomHermitianMatrix(d, rng));
        X = MeasurementSet::WithIdentity(obs);
      }
    }
    const ObservabilityReport kalman = KalmanReport(L, X);
    const PbhResult pbh = PbhTest(L, X);
    EXPECT_EQ(kalman.observable, pbh.observable) << "trial " << trial;
    if (!pbh.observable) EXPECT_TRUE(pbh.witness.has_value());
    observable += kalman.observable;
  }
  // Both verdicts are exercised.
  EXPECT_GT(observable, 0);
  EXPECT_LT(observable, 50);
}

TEST(ObservabilityTest, EarlyStoppingMatchesForcedDepth) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const Superoperator L = trial % 2 == 0
                                ? GeneratorMatrix(RandomLindblad(d, 1, rng))
                                : Hamiltonian(RandomHermitianMatrix(d, rng));
    const MeasurementSet X =
        MeasurementSet::WithIdentity({RandomHermitianMatrix(d, rng)});
    const KrylovResult early = KrylovBasis(DynamicsMatrix(L), X.VecMatrix());
    const Eigen::MatrixXcd forced =
        KalmanMatrix(DynamicsMatrix(L), X.VecMatrix(), d * d - 1);
    EXPECT_EQ(forced.cols(), X.size() * d * d);
    const int forced_rank = NumericalRank(forced).rank();
    EXPECT_EQ(early.audit.rank == d * d, forced_rank == d * d) << "trial " << trial;
    EXPECT_LE(early.k_stop, d * d - 1);
  }
}

// Diagonal dissipator in the Pauli basis with 15 closely spaced decay
// rates: each Pauli string is an eigenvector, so a probe without one Pauli
// component cannot reach it. Plain Krylov iteration amplifies the roundoff
// left in that component; the modal check must remove it again.
TEST(ObservabilityTest, ProbeMissingOnePauliIsNotObservable) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uniform(0.1, 1.1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const OperatorBasis raw = PauliBasis(2);
  int deflated = 0;
  for (int draw = 0; draw < 20; ++draw) {
    DissipativeQubitSpec spec;
    spec.n_qubits = 2;
    spec.rates = Eigen::VectorXd(15);
    for (int k = 0; k < 15; ++k) spec.rates(k) = uniform(rng);
    const int drop = 1 + draw % 15;
    spec.probe = OperatorMatrix::Zero(4, 4);
    for (int i = 1; i < 16; ++i) {
      const double c = normal(rng);
      if (i != drop) spec.probe += c * raw.elements[i];
    }
    const ModelSystem m = DissipativeNQubit(spec);
    const Superoperator L = GeneratorMatrix(m.generator);
    const ObservabilityReport r = KalmanReport(L, m.measurements);
    EXPECT_EQ(r.rank, 15) << "draw " << draw;
    EXPECT_FALSE(PbhTest(L, m.measurements).observable);
    // The missing Pauli string spans 𝒩.
    ASSERT_EQ(r.non_obs_basis.cols(), 1);
    EXPECT_NEAR(std::abs(Vec(raw.elements[drop]).normalized().dot(
                    r.non_obs_basis.col(0))),
                1.0, 1e-8);
    deflated += r.modal_deflated;
  }
  // Without the modal check a good share of these draws report rank 16.
  EXPECT_GT(deflated, 0);
}

TEST(ObservabilityTest, RankIsMonotoneInObservables) {
  std::mt19937_64 rng(22);
  const Superoperator L = Hamiltonian(RandomHermitianMatrix(3, rng));
  std::vector<OperatorMatrix> obs;
  int previous = 0;
  for (int k = 0; k < 3; ++k) {
    obs.push_back(RandomHermitianMatrix(3, rng));
    const int rank = KalmanReport(L, MeasurementSet::WithIdentity(obs)).rank;
    EXPECT_GE(rank, previous);
    previous = rank;
  }
  EXPECT_EQ(previous, 9);
}

TEST(ObservabilityTest, DiscretePropagatorReport) {
  // The sampled propagator of σx, with X = {I, σz}, stays non-observable.
  const Superoperator P = Propagate(Hamiltonian(PauliMatrix('X')), 0.3);
  const ObservabilityReport r = KalmanReport(P, IdentityAndZ());
  EXPECT_EQ(r.rank, 3);
}

TEST(ObservabilityTest, TargetReconstructability) {
  const Superoperator L = Hamiltonian(PauliMatrix('X'));
  const ObservabilityReport r = KalmanReport(L, IdentityAndZ());
  EXPECT_TRUE(TargetReconstructable(r, PauliMatrix('Y')).reconstructable);
  EXPECT_TRUE(TargetReconstructable(r, PauliMatrix('Z') + 0.5 * PauliMatrix('Y'))
                  .reconstructable);
  const TargetCheck x = TargetReconstructable(r, PauliMatrix('X'));
  EXPECT_FALSE(x.reconstructable);
  EXPECT_NEAR(x.relative_residual, 1.0, 1e-12);
}

TEST(ObservabilityTest, GenericityTrialsAreSeeded) {
  const TrialFactory factory = RandomUnitaryTrials(2, 2);
  const GenericitySummary a = GenericityTrials(factory, 10, 99);
  const GenericitySummary b = GenericityTrials(factory, 10, 99);
  EXPECT_EQ(a.n_observable, b.n_observable);
  EXPECT_EQ(a.rank_histogram, b.rank_histogram);
  EXPECT_EQ(a.n_failed, 0);
  EXPECT_EQ(a.n_trials, 10);
}

TEST(ObservabilityTest, CountingBoundsArithmetic) {
  EXPECT_FALSE(EvaluateCountingBounds(4, 3).unitary_possible);
  EXPECT_TRUE(EvaluateCountingBounds(4, 4).unitary_possible);
  for (int k = 2; k <= 6; ++k) {
    const CountingBounds b = EvaluateCountingBounds(k * k, 2, {{2, k}});
    EXPECT_EQ(b.multipartite_lhs, k * k);
    EXPECT_EQ(b.multipartite_rhs, 2 * k * k - 3);
    EXPECT_TRUE(*b.multipartite_possible);
  }
  const CountingBounds four = EvaluateCountingBounds(16, 2, {{4, 2}});
  EXPECT_EQ(four.multipartite_lhs, 16);
  EXPECT_EQ(four.multipartite_rhs, 11);
  EXPECT_FALSE(*four.multipartite_possible);
  EXPECT_TRUE(*EvaluateCountingBounds(8, 2, {{3, 2}}).multipartite_possible);
}

}  // namespace
}  // namespace dqst
