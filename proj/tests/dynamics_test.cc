#include "dqst/dynamics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dqst/errors.h"
#include "test_util.h"

namespace dqst {
namespace {

using testing::RandomComplex;
using testing::RandomHermitianMatrix;
using testing::RandomLindblad;

// 𝓛(X) evaluated directly from the operator form.
OperatorMatrix ApplyLindblad(const LindbladGenerator& gen,
                             const OperatorMatrix& X) {
  const Complex i(0.0, 1.0);
  OperatorMatrix out = i * (gen.hamiltonian * X - X * gen.hamiltonian);
  for (const auto& L : gen.noise_ops) {
    const OperatorMatrix LdL = L.adjoint() * L;
    out += L.adjoint() * X * L - 0.5 * (LdL * X + X * LdL);
  }
  return out;
}

TEST(DynamicsTest, GeneratorMatchesOperatorForm) {
  std::mt19937_64 rng(10);
  for (int d : {2, 3, 4}) {
    const LindbladGenerator gen = RandomLindblad(d, 2, rng);
    const Superoperator L = GeneratorMatrix(gen);
    ASSERT_EQ(L.dim, d);
    ASSERT_EQ(L.kind, SuperoperatorKind::kGenerator);
    const OperatorMatrix X = RandomComplex(d, d, rng);
    const OperatorMatrix expected = ApplyLindblad(gen, X);
    EXPECT_LE((Unvec(L.matrix * Vec(X), d) - expected).norm(),
              1e-12 * (1.0 + expected.norm()));
  }
}

TEST(DynamicsTest, PauliZHamiltonianRotatesSigmaX) {
  LindbladGenerator gen;
  gen.hamiltonian = PauliMatrix('Z');
  const Superoperator L = GeneratorMatrix(gen);
  // i[σz, σx] = i·2iσy = −2σy.
  const OperatorMatrix action = Unvec(L.matrix * Vec(PauliMatrix('X')), 2);
  EXPECT_LE((action + 2.0 * PauliMatrix('Y')).norm(), 1e-14);
  for (double t : {0.0, 0.3, 1.0, 2.5}) {
    const Superoperator P = Propagate(L, t);
    const OperatorMatrix evolved = Unvec(P.matrix * Vec(PauliMatrix('X')), 2);
    const OperatorMatrix expected =
        std::cos(2.0 * t) * PauliMatrix('X') - std::sin(2.0 * t) * PauliMatrix('Y');
    EXPECT_LE((evolved - expected).norm(), 1e-12) << "t = " << t;
  }
}

TEST(DynamicsTest, PropagatorMatchesHeisenbergUnitary) {
  std::mt19937_64 rng(11);
  const OperatorMatrix H = RandomHermitianMatrix(3, rng);
  LindbladGenerator gen;
  gen.hamiltonian = H;
  const double t = 0.7;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
  const Eigen::VectorXcd phases =
      (Complex(0.0, 1.0) * t * eig.eigenvalues().cast<Complex>()).array().exp();
  const OperatorMatrix U =
      eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  const OperatorMatrix X = RandomHermitianMatrix(3, rng);
  // e^{iHt} X e^{−iHt} solves dX/dt = i[H, X].
  const OperatorMatrix expected = U * X * U.adjoint();
  const Superoperator P = Propagate(GeneratorMatrix(gen), t);
  EXPECT_LE((Unvec(P.matrix * Vec(X), 3) - expected).norm(), 1e-12);
}

TEST(DynamicsTest, GeneratorsAndPropagatorsAreUnital) {
  std::mt19937_64 rng(12);
  for (int d : {2, 3, 4}) {
    const Superoperator L = GeneratorMatrix(RandomLindblad(d, 3, rng));
    const OperatorVector id = Vec(OperatorMatrix::Identity(d, d));
    EXPECT_LE((L.matrix * id).norm(), 1e-10);
    const Superoperator P = Propagate(L, 1.3);
    EXPECT_EQ(P.kind, SuperoperatorKind::kPropagator);
    EXPECT_LE((P.matrix * id - id).norm(), 1e-10);
  }
}

TEST(DynamicsTest, PropagateAtZeroIsIdentity) {
  std::mt19937_64 rng(13);
  const Superoperator L = GeneratorMatrix(RandomLindblad(2, 1, rng));
  const Superoperator P = Propagate(L, 0.0);
  EXPECT_LE((P.matrix - Eigen::MatrixXcd::Identity(4, 4)).norm(), 0.0);
  EXPECT_THROW(Propagate(L, -1.0), InvalidInputError);
}

TEST(DynamicsTest, PropagatorSemigroupProperty) {
  std::mt19937_64 rng(14);
  const Superoperator L = GeneratorMatrix(RandomLindblad(3, 2, rng));
  const Eigen::MatrixXcd a = Propagate(L, 0.4).matrix;
  const Eigen::MatrixXcd b = Propagate(L, 0.9).matrix;
  const Eigen::MatrixXcd ab = Propagate(L, 1.3).matrix;
  EXPECT_LE((a * b - ab).norm(), 1e-11 * ab.norm());
}

TEST(DynamicsTest, KrausSuperoperatorAction) {
  std::mt19937_64 rng(15);
  const int d = 3;
  KrausMap map;
  for (int k = 0; k < 3; ++k) map.kraus_ops.push_back(RandomComplex(d, d, rng));
  const Superoperator phi = KrausSuperoperator(map);
  EXPECT_EQ(phi.kind, SuperoperatorKind::kPropagator);
  const OperatorMatrix X = RandomComplex(d, d, rng);
  OperatorMatrix expected = OperatorMatrix::Zero(d, d);
  for (const auto& M : map.kraus_ops) expected += M * X * M.adjoint();
  EXPECT_LE((Unvec(phi.matrix * Vec(X), d) - expected).norm(),
            1e-12 * expected.norm());
}

TEST(DynamicsTest, UnitalKrausMapFixesIdentity) {
  // Mixture of unitaries is unital.
  const double p = 0.3;
  KrausMap map{{std::sqrt(1.0 - p) * OperatorMatrix::Identity(2, 2),
                std::sqrt(p) * PauliMatrix('X')}};
  const Superoperator phi = KrausSuperoperator(map);
  const OperatorVector id = Vec(OperatorMatrix::Identity(2, 2));
  EXPECT_LE((phi.matrix * id - id).norm(), 1e-14);
}

TEST(DynamicsTest, GksToLindbladMatchesDoubleSum) {
  std::mt19937_64 rng(16);
  GKSSpec spec;
  spec.basis = PauliBasis(1, PauliNormalization::kRawPauli);
  const Eigen::MatrixXcd G = RandomComplex(3, 3, rng);
  spec.coefficients = G * G.adjoint();
  spec.hamiltonian = RandomHermitianMatrix(2, rng);
  const LindbladGenerator gen = GksToLindblad(spec);
  const OperatorMatrix X = RandomComplex(2, 2, rng);
  const Complex i(0.0, 1.0);
  OperatorMatrix expected =
      i * (spec.hamiltonian * X - X * spec.hamiltonian);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const OperatorMatrix& Fa = spec.basis.elements[a + 1];
      const OperatorMatrix& Fb = spec.basis.elements[b + 1];
      const OperatorMatrix FaFb = Fa.adjoint() * Fb;
      expected += spec.coefficients(b, a) *
                  (Fa.adjoint() * X * Fb - 0.5 * (FaFb * X + X * FaFb));
    }
  }
  const Superoperator L = GeneratorMatrix(gen);
  EXPECT_LE((Unvec(L.matrix * Vec(X), 2) - expected).norm(),
            1e-12 * expected.norm());
}

TEST(DynamicsTest, GksIdentityCoefficientsOnSigmaZ) {
  GKSSpec spec;
  spec.basis = PauliBasis(1, PauliNormalization::kRawPauli);
  spec.coefficients = Eigen::MatrixXcd::Identity(3, 3);
  spec.hamiltonian = OperatorMatrix::Zero(2, 2);
  const Superoperator L = GeneratorMatrix(GksToLindblad(spec));
  // Σ_F (F σz F − σz) over F = X, Y, Z: (−1 − 1 + 1)σz − 3σz.
  const OperatorMatrix action = Unvec(L.matrix * Vec(PauliMatrix('Z')), 2);
  EXPECT_LE((action + 4.0 * PauliMatrix('Z')).norm(), 1e-13);
}

TEST(DynamicsTest, GksRejectsIndefiniteMatrix) {
  GKSSpec spec;
  spec.basis = PauliBasis(1, PauliNormalization::kRawPauli);
  spec.coefficients = Eigen::MatrixXcd::Identity(3, 3);
  spec.coefficients(1, 1) = -1.0;
  spec.hamiltonian = OperatorMatrix::Zero(2, 2);
  EXPECT_THROW(GksToLindblad(spec), InvalidInputError);
}

TEST(DynamicsTest, AmplitudeDampingSpectrum) {
  const double gamma = 0.8;
  LindbladGenerator gen;
  gen.hamiltonian = OperatorMatrix::Zero(2, 2);
  OperatorMatrix lower = OperatorMatrix::Zero(2, 2);
  lower(0, 1) = std::sqrt(gamma);
  gen.noise_ops = {lower};
  const Superoperator L = GeneratorMatrix(gen);
  // Heisenberg spectrum of amplitude damping: 0, −γ/2 (twice), −γ.
  Eigen::VectorXd re = Spectrum(L).real();
  std::sort(re.data(), re.data() + re.size());
  EXPECT_NEAR(re(0), -gamma, 1e-12);
  EXPECT_NEAR(re(1), -gamma / 2, 1e-12);
  EXPECT_NEAR(re(2), -gamma / 2, 1e-12);
  EXPECT_NEAR(re(3), 0.0, 1e-12);
  const auto lambda2 = SlowestDecayEigenvalue(L);
  ASSERT_TRUE(lambda2.has_value());
  EXPECT_NEAR(lambda2->real(), -gamma / 2, 1e-12);
}

TEST(DynamicsTest, AliasingForPauliZ) {
  LindbladGenerator gen;
  gen.hamiltonian = PauliMatrix('Z');
  const Superoperator L = GeneratorMatrix(gen);
  // Eigenvalues 0, 0, ±2i; dt = π puts the gap 2 on the period 2π/dt = 2.
  EXPECT_FALSE(AliasingOk(L, std::numbers::pi).ok);
  EXPECT_TRUE(AliasingOk(L, 1.0).ok);
}

TEST(DynamicsTest, EvolverMatchesPropagate) {
  std::mt19937_64 rng(17);
  const Superoperator L = GeneratorMatrix(RandomLindblad(3, 2, rng));
  const Evolver evolver(L);
  EXPECT_TRUE(evolver.spectral());
  const Eigen::MatrixXcd X = RandomComplex(9, 2, rng);
  for (double t : {0.0, 0.5, 3.0}) {
    const Eigen::MatrixXcd expected = Propagate(L, t).matrix * X;
    EXPECT_LE((evolver.Apply(t, X) - expected).norm(), 1e-10 * expected.norm());
  }
}

TEST(DynamicsTest, RejectsNonHermitianHamiltonian) {
  LindbladGenerator gen;
  gen.hamiltonian = OperatorMatrix::Zero(2, 2);
  gen.hamiltonian(0, 1) = 1.0;
  EXPECT_THROW(GeneratorMatrix(gen), InvalidInputError);
}

}  // namespace
}  // namespace dqst
