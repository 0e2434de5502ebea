#pragma once

// Dense complex linear algebra over the operator space B(C^d).
//
// Operators are d×d complex matrices; their vectorized form stacks columns,
// so entry (i, j) of B lands at index j·d + i (0-based). Every superoperator
// in the library is a d²×d² matrix acting on this layout.

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dqst {

using Complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using OperatorVector = Eigen::VectorXcd;

inline constexpr double kHermiticityTol = 1e-10;

OperatorVector Vec(const OperatorMatrix& B);

/// Inverse of Vec. Throws DimensionError unless v.size() == d·d.
OperatorMatrix Unvec(const OperatorVector& v, int d);

/// Inverse of Vec with d inferred; v.size() must be a perfect square.
OperatorMatrix Unvec(const OperatorVector& v);

/// Hilbert–Schmidt inner product tr(A†B).
Complex HsInner(const OperatorMatrix& A, const OperatorMatrix& B);

/// max |M − M†| over entries.
double HermiticityDeviation(const OperatorMatrix& M);

bool IsHermitian(const OperatorMatrix& M, double tol = kHermiticityTol);

/// Throws InvalidInputError naming `what` if M is not square, not finite, or
/// not Hermitian within tol.
void RequireHermitian(const OperatorMatrix& M, std::string_view what,
                      double tol = kHermiticityTol);

bool AllFinite(const Eigen::MatrixXcd& M);

/// Integer square root of a matrix-vector length; throws unless exact.
int DimFromVectorLength(Eigen::Index length);

enum class PauliNormalization {
  // F₀ = I/√d, F_i = bare Pauli strings (F_i² = I).
  kRawPauli,
  // Every element has unit Hilbert–Schmidt norm.
  kOrthonormal,
};

struct OperatorBasis {
  int dim = 0;
  PauliNormalization normalization = PauliNormalization::kRawPauli;
  std::vector<OperatorMatrix> elements;
  // "IXZ"-style labels, one per element.
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(elements.size()); }
};

/// The 4ⁿ Pauli strings on n qubits. Element i is σ^{i₁}⊗…⊗σ^{iₙ} where
/// i₁…iₙ are the base-4 digits of i (most significant digit = first factor)
/// and digit values 0..3 select (I, X, Y, Z).
OperatorBasis PauliBasis(int n_qubits,
                         PauliNormalization normalization =
                             PauliNormalization::kRawPauli);

OperatorMatrix PauliMatrix(char which);

/// Tensor product of single-qubit Paulis, e.g. "IXZZ". Leftmost character
/// is the first (most significant) tensor factor.
OperatorMatrix PauliString(std::string_view labels);

OperatorMatrix Kron(const OperatorMatrix& A, const OperatorMatrix& B);
OperatorMatrix Kron(std::initializer_list<OperatorMatrix> factors);

// ---------------------------------------------------------------------------
// Numerical rank.

/// Singular values above `threshold` count toward the rank. The default
/// threshold is max(rows, cols)·σ_max·ε·safety_factor; an absolute value
/// overrides it.
struct RankPolicy {
  double safety_factor = 100.0;
  std::optional<double> absolute_threshold;

  double Threshold(Eigen::Index rows, Eigen::Index cols,
                   double sigma_max) const;
};

/// Rank decision together with the singular values on either side of the
/// threshold, so that borderline verdicts can be audited.
struct RankAudit {
  int rank = 0;
  double threshold = 0.0;
  // Smallest singular value counted in the rank (0 if rank == 0).
  double smallest_kept = 0.0;
  // Largest singular value below the threshold (0 if none dropped).
  double largest_dropped = 0.0;
};

struct RankResult {
  RankAudit audit;
  Eigen::VectorXd singular_values;

  int rank() const { return audit.rank; }
};

RankResult NumericalRank(const Eigen::MatrixXcd& M,
                         const RankPolicy& policy = {});

/// Orthonormal basis (as columns) of span{columns of V}, rank-revealing.
Eigen::MatrixXcd OrthonormalSpan(const Eigen::MatrixXcd& V,
                                 const RankPolicy& policy = {});

/// Orthonormal basis of the orthogonal complement of the column span of an
/// orthonormal Q (Q may have zero columns).
Eigen::MatrixXcd OrthogonalComplement(const Eigen::MatrixXcd& Q);

/// Π⊥ = I − P with P the orthogonal projector onto span(vectors). Returns
/// the identity of size `length` when `vectors` is empty.
Eigen::MatrixXcd ComplementProjector(const std::vector<OperatorVector>& vectors,
                                     Eigen::Index length,
                                     const RankPolicy& policy = {});

}  // namespace dqst
