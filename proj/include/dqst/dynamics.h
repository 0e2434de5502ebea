#pragma once

// Heisenberg-picture Markovian dynamics. All superoperators act on
// vectorized observables; states only ever appear inside inner products.

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dqst/linops.h"

namespace dqst {

/// Lindblad generator 𝓛(X) = i[H, X] + Σ_k (L_k† X L_k − ½{L_k†L_k, X}).
struct LindbladGenerator {
  OperatorMatrix hamiltonian;
  std::vector<OperatorMatrix> noise_ops;

  int dim() const { return static_cast<int>(hamiltonian.rows()); }
};

/// Heisenberg Kraus map Φ(X) = Σ_k M_k X M_k†; unital when Σ M_k M_k† = I.
struct KrausMap {
  std::vector<OperatorMatrix> kraus_ops;
};

enum class SuperoperatorKind { kGenerator, kPropagator };

struct Superoperator {
  int dim = 0;  // d; the matrix is d²×d².
  Eigen::MatrixXcd matrix;
  SuperoperatorKind kind = SuperoperatorKind::kGenerator;
  // Elapsed time for propagators (1 for a one-step discrete map).
  double time = 0.0;

  int size() const { return dim * dim; }
};

/// GKS form 𝓛(X) = i[H, X] + Σ_{i,j≥1} a_ji (F_i† X F_j − ½{F_i†F_j, X})
/// over a basis whose element 0 is proportional to the identity.
struct GKSSpec {
  OperatorBasis basis;
  // (d²−1)×(d²−1), Hermitian positive semidefinite.
  Eigen::MatrixXcd coefficients;
  // Zero matrix when absent.
  OperatorMatrix hamiltonian;
};

/// Builds L = i(I⊗H − Hᵀ⊗I) + Σ_k [L_kᵀ⊗L_k† − ½(I⊗L_k†L_k + (L_k†L_k)ᵀ⊗I)].
/// Throws InvalidInputError for a non-Hermitian H and DimensionError for
/// noise operators of the wrong size.
Superoperator GeneratorMatrix(const LindbladGenerator& gen);

/// Φ̂ = Σ_k conj(M_k)⊗M_k, so that Φ̂·vec(X) = vec(Σ_k M_k X M_k†).
Superoperator KrausSuperoperator(const KrausMap& map);

/// e^{Lt} for a generator L and t ≥ 0 (scaling-and-squaring Padé).
Superoperator Propagate(const Superoperator& generator, double t);

/// Diagonalizes the GKS matrix, A = V D V†, and returns the canonical noise
/// operators L_k = √λ_k Σ_m V_mk F_m (zero-weight directions dropped).
/// Throws InvalidInputError when A is not Hermitian or has an eigenvalue
/// below −tol.
LindbladGenerator GksToLindblad(const GKSSpec& spec, double tol = 1e-10);

struct AliasingResult {
  bool ok = true;
  // Eigenvalue pairs (λ_i, λ_j) with equal real parts whose imaginary gap is
  // a nonzero multiple of 2π/Δt.
  std::vector<std::pair<Complex, Complex>> offending;
};

struct AliasingTolerances {
  double real_part = 1e-9;
  double modulus = 1e-7;
  // Eigenvalues closer than this are treated as one eigenvalue.
  double distinct = 1e-9;
};

/// Checks the sampled-observability condition for sampling interval dt:
/// no two distinct eigenvalues of L with equal real parts may have an
/// imaginary gap equal to 2πs/dt for integer s ≥ 1.
AliasingResult AliasingOk(const Superoperator& generator, double dt,
                          const AliasingTolerances& tol = {});

/// Eigenvalues of a superoperator matrix.
Eigen::VectorXcd Spectrum(const Superoperator& op);

/// The nonzero eigenvalue of the generator with the largest real part
/// (|λ| > zero_tol). Empty when every eigenvalue is zero.
std::optional<Complex> SlowestDecayEigenvalue(const Superoperator& generator,
                                              double zero_tol = 1e-8);

/// Evaluates e^{Lt}·x for many t. Uses an eigendecomposition of L when it
/// is well conditioned and falls back to a dense exponential otherwise.
class Evolver {
 public:
  explicit Evolver(const Superoperator& generator,
                   double max_condition = 1e7);

  OperatorVector Apply(double t, const OperatorVector& x) const;

  /// Applies e^{Lt} to every column of X.
  Eigen::MatrixXcd Apply(double t, const Eigen::MatrixXcd& X) const;

  bool spectral() const { return spectral_; }
  // Valid only when spectral(): L = V diag(λ) V⁻¹.
  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }
  /// V⁻¹X, the eigen-coordinates of the columns of X (spectral() only).
  Eigen::MatrixXcd Coordinates(const Eigen::MatrixXcd& X) const;
  const Superoperator& generator() const { return generator_; }

 private:
  Superoperator generator_;
  bool spectral_ = false;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> eigenvectors_lu_;
};

}  // namespace dqst
