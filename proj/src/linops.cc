#include "dqst/linops.h"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "dqst/errors.h"

namespace dqst {

OperatorVector Vec(const OperatorMatrix& B) {
  if (B.rows() != B.cols()) {
    std::ostringstream msg;
    msg << "vec: operator must be square, got " << B.rows() << "x"
        << B.cols();
    throw DimensionError(msg.str());
  }
  // Eigen stores column-major, so the raw buffer is already the stacking.
  return Eigen::Map<const OperatorVector>(B.data(), B.size());
}

int DimFromVectorLength(Eigen::Index length) {
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(length))));
  if (d <= 0 || d * d != length) {
    std::ostringstream msg;
    msg << "vector length " << length << " is not a perfect square";
    throw DimensionError(msg.str());
  }
  return static_cast<int>(d);
}

OperatorMatrix Unvec(const OperatorVector& v, int d) {
  if (d <= 0 || v.size() != static_cast<Eigen::Index>(d) * d) {
    std::ostringstream msg;
    msg << "unvec: length " << v.size() << " does not match d=" << d;
    throw DimensionError(msg.str());
  }
  return Eigen::Map<const OperatorMatrix>(v.data(), d, d);
}

OperatorMatrix Unvec(const OperatorVector& v) {
  return Unvec(v, DimFromVectorLength(v.size()));
}

Complex HsInner(const OperatorMatrix& A, const OperatorMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw DimensionError("hs_inner: operand dimensions differ");
  }
  // tr(A†B) = Σ_ij conj(A_ij) B_ij
  return (A.array().conjugate() * B.array()).sum();
}

double HermiticityDeviation(const OperatorMatrix& M) {
  if (M.rows() != M.cols()) return std::numeric_limits<double>::infinity();
  if (M.size() == 0) return 0.0;
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

bool IsHermitian(const OperatorMatrix& M, double tol) {
  return HermiticityDeviation(M) <= tol;
}

bool AllFinite(const Eigen::MatrixXcd& M) {
  return M.allFinite();
}

void RequireHermitian(const OperatorMatrix& M, std::string_view what,
                      double tol) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    std::ostringstream msg;
    msg << what << " must be a non-empty square matrix, got " << M.rows()
        << "x" << M.cols();
    throw DimensionError(msg.str());
  }
  if (!M.allFinite()) {
    throw InvalidInputError(std::string(what) + " has non-finite entries");
  }
  const double dev = HermiticityDeviation(M);
  if (dev > tol) {
    std::ostringstream msg;
    msg << what << " is not Hermitian (max |M - M^dagger| = " << dev
        << " > " << tol << ")";
    throw InvalidInputError(msg.str());
  }
}

OperatorMatrix PauliMatrix(char which) {
  OperatorMatrix s(2, 2);
  const Complex i(0.0, 1.0);
  switch (which) {
    case 'I': case '0':
      s << 1, 0, 0, 1;
      break;
    case 'X': case 'x': case '1':
      s << 0, 1, 1, 0;
      break;
    case 'Y': case 'y': case '2':
      s << 0, -i, i, 0;
      break;
    case 'Z': case 'z': case '3':
      s << 1, 0, 0, -1;
      break;
    default:
      throw InvalidInputError(std::string("unknown Pauli label '") + which +
                              "'");
  }
  return s;
}

OperatorMatrix Kron(const OperatorMatrix& A, const OperatorMatrix& B) {
  return Eigen::kroneckerProduct(A, B).eval();
}

OperatorMatrix Kron(std::initializer_list<OperatorMatrix> factors) {
  OperatorMatrix out = OperatorMatrix::Identity(1, 1);
  for (const auto& f : factors) out = Kron(out, f);
  return out;
}

OperatorMatrix PauliString(std::string_view labels) {
  if (labels.empty()) throw InvalidInputError("empty Pauli string");
  OperatorMatrix out = OperatorMatrix::Identity(1, 1);
  for (char c : labels) {
    if (c == 'I' || c == 'i') c = 'I';
    out = Kron(out, PauliMatrix(c));
  }
  return out;
}

OperatorBasis PauliBasis(int n_qubits, PauliNormalization normalization) {
  if (n_qubits <= 0) {
    throw InvalidInputError("pauli_basis: number of qubits must be >= 1");
  }
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  const int d = 1 << n_qubits;
  const int count = d * d;
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  OperatorBasis basis;
  basis.dim = d;
  basis.normalization = normalization;
  basis.elements.reserve(count);
  basis.labels.reserve(count);
  for (int index = 0; index < count; ++index) {
    std::string label(n_qubits, 'I');
    int rest = index;
    for (int q = n_qubits - 1; q >= 0; --q) {
      label[q] = kLetters[rest % 4];
      rest /= 4;
    }
    OperatorMatrix element = PauliString(label);
    if (index == 0 || normalization == PauliNormalization::kOrthonormal) {
      element /= sqrt_d;
    }
    basis.elements.push_back(std::move(element));
    basis.labels.push_back(std::move(label));
  }
  return basis;
}

double RankPolicy::Threshold(Eigen::Index rows, Eigen::Index cols,
                             double sigma_max) const {
  if (absolute_threshold) return *absolute_threshold;
  return static_cast<double>(std::max(rows, cols)) * sigma_max *
         std::numeric_limits<double>::epsilon() * safety_factor;
}

RankResult NumericalRank(const Eigen::MatrixXcd& M, const RankPolicy& policy) {
  if (!M.allFinite()) {
    throw NumericalError("numerical_rank: matrix has non-finite entries");
  }
  RankResult result;
  if (M.size() == 0) return result;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  result.singular_values = svd.singularValues();
  const auto& s = result.singular_values;
  const double sigma_max = s.size() > 0 ? s(0) : 0.0;
  const double threshold = policy.Threshold(M.rows(), M.cols(), sigma_max);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > threshold) ++rank;
  }
  result.audit.rank = rank;
  result.audit.threshold = threshold;
  result.audit.smallest_kept = rank > 0 ? s(rank - 1) : 0.0;
  result.audit.largest_dropped = rank < s.size() ? s(rank) : 0.0;
  return result;
}

Eigen::MatrixXcd OrthonormalSpan(const Eigen::MatrixXcd& V,
                                 const RankPolicy& policy) {
  if (V.cols() == 0) return Eigen::MatrixXcd(V.rows(), 0);
  if (!V.allFinite()) {
    throw NumericalError("orthonormal span: non-finite input");
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double threshold =
      policy.Threshold(V.rows(), V.cols(), s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixU().leftCols(rank);
}

Eigen::MatrixXcd OrthogonalComplement(const Eigen::MatrixXcd& Q) {
  const Eigen::Index n = Q.rows();
  const Eigen::Index r = Q.cols();
  if (r == 0) return Eigen::MatrixXcd::Identity(n, n);
  if (r >= n) return Eigen::MatrixXcd(n, 0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Q);
  Eigen::MatrixXcd full = qr.householderQ();
  return full.rightCols(n - r);
}

Eigen::MatrixXcd ComplementProjector(const std::vector<OperatorVector>& vectors,
                                     Eigen::Index length,
                                     const RankPolicy& policy) {
  Eigen::MatrixXcd projector = Eigen::MatrixXcd::Identity(length, length);
  if (vectors.empty()) return projector;
  Eigen::MatrixXcd stacked(length, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != length) {
      throw DimensionError("complement_projector: vector lengths differ");
    }
    stacked.col(static_cast<Eigen::Index>(k)) = vectors[k];
  }
  const Eigen::MatrixXcd Q = OrthonormalSpan(stacked, policy);
  projector -= Q * Q.adjoint();
  // Symmetrize away rounding so Π⊥ is Hermitian to the last bit.
  return (0.5 * (projector + projector.adjoint())).eval();
}

}  // namespace dqst
