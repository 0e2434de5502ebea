#include "dqst/dynamics.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "dqst/errors.h"

namespace dqst {
namespace {

Eigen::MatrixXcd KronProduct(const Eigen::MatrixXcd& A,
                             const Eigen::MatrixXcd& B) {
  return Eigen::kroneckerProduct(A, B).eval();
}

void RequireGenerator(const Superoperator& op, const char* what) {
  if (op.kind != SuperoperatorKind::kGenerator) {
    throw InvalidInputError(std::string(what) +
                            ": expected a generator superoperator");
  }
  if (op.matrix.rows() != op.size() || op.matrix.cols() != op.size()) {
    throw DimensionError(std::string(what) +
                         ": superoperator matrix is not d²×d²");
  }
}

}  // namespace

Superoperator GeneratorMatrix(const LindbladGenerator& gen) {
  RequireHermitian(gen.hamiltonian, "Hamiltonian");
  const int d = gen.dim();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
  const Complex i(0.0, 1.0);

  Superoperator out;
  out.dim = d;
  out.kind = SuperoperatorKind::kGenerator;
  out.matrix = i * (KronProduct(I, gen.hamiltonian) -
                    KronProduct(gen.hamiltonian.transpose(), I));
  for (std::size_t k = 0; k < gen.noise_ops.size(); ++k) {
    const auto& L = gen.noise_ops[k];
    if (L.rows() != d || L.cols() != d) {
      std::ostringstream msg;
      msg << "noise operator " << k << " is " << L.rows() << "x" << L.cols()
          << ", expected " << d << "x" << d;
      throw DimensionError(msg.str());
    }
    const Eigen::MatrixXcd LdL = L.adjoint() * L;
    out.matrix += KronProduct(L.transpose(), L.adjoint()) -
                  0.5 * (KronProduct(I, LdL) + KronProduct(LdL.transpose(), I));
  }
  return out;
}

Superoperator KrausSuperoperator(const KrausMap& map) {
  if (map.kraus_ops.empty()) {
    throw InvalidInputError("Kraus map has no operators");
  }
  const auto d = map.kraus_ops.front().rows();
  Superoperator out;
  out.dim = static_cast<int>(d);
  out.kind = SuperoperatorKind::kPropagator;
  out.time = 1.0;
  out.matrix = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (const auto& M : map.kraus_ops) {
    if (M.rows() != d || M.cols() != d) {
      throw DimensionError("Kraus operators have mismatched dimensions");
    }
    out.matrix += KronProduct(M.conjugate(), M);
  }
  return out;
}

Superoperator Propagate(const Superoperator& generator, double t) {
  RequireGenerator(generator, "propagate");
  if (!(t >= 0.0)) {
    throw InvalidInputError("propagate: time must be non-negative");
  }
  Superoperator out;
  out.dim = generator.dim;
  out.kind = SuperoperatorKind::kPropagator;
  out.time = t;
  if (t == 0.0) {
    out.matrix = Eigen::MatrixXcd::Identity(generator.size(), generator.size());
    return out;
  }
  const Eigen::MatrixXcd scaled = generator.matrix * t;
  out.matrix = scaled.exp();
  if (!out.matrix.allFinite()) {
    throw NumericalError("propagate: matrix exponential overflowed");
  }
  return out;
}

LindbladGenerator GksToLindblad(const GKSSpec& spec, double tol) {
  const int d = spec.basis.dim;
  const auto n = static_cast<Eigen::Index>(d) * d - 1;
  if (spec.basis.size() != n + 1) {
    throw DimensionError("GKS basis must have d² elements");
  }
  if (spec.coefficients.rows() != n || spec.coefficients.cols() != n) {
    throw DimensionError("GKS matrix must be (d²−1)×(d²−1)");
  }
  if (HermiticityDeviation(spec.coefficients) > tol) {
    throw InvalidInputError("GKS matrix is not Hermitian");
  }

  LindbladGenerator gen;
  gen.hamiltonian = spec.hamiltonian.size() == 0
                        ? OperatorMatrix::Zero(d, d)
                        : spec.hamiltonian;
  if (n == 0) return gen;

  const Eigen::MatrixXcd A =
      0.5 * (spec.coefficients + spec.coefficients.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("GKS matrix diagonalization failed");
  }
  const auto& lambda = eig.eigenvalues();
  const auto& V = eig.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (lambda(k) < -tol) {
      std::ostringstream msg;
      msg << "invalid GKS spec: eigenvalue " << lambda(k)
          << " is negative";
      throw InvalidInputError(msg.str());
    }
    if (lambda(k) <= tol) continue;
    OperatorMatrix L = OperatorMatrix::Zero(d, d);
    for (Eigen::Index m = 0; m < n; ++m) {
      L += V(m, k) * spec.basis.elements[static_cast<std::size_t>(m + 1)];
    }
    gen.noise_ops.push_back(std::sqrt(lambda(k)) * L);
  }
  return gen;
}

Eigen::VectorXcd Spectrum(const Superoperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(op.matrix, false);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigenvalue computation did not converge");
  }
  return eig.eigenvalues();
}

std::optional<Complex> SlowestDecayEigenvalue(const Superoperator& generator,
                                              double zero_tol) {
  const Eigen::VectorXcd ev = Spectrum(generator);
  std::optional<Complex> best;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) <= zero_tol) continue;
    if (!best || ev(k).real() > best->real()) best = ev(k);
  }
  return best;
}

AliasingResult AliasingOk(const Superoperator& generator, double dt,
                          const AliasingTolerances& tol) {
  RequireGenerator(generator, "aliasing check");
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInputError("aliasing check: sampling interval must be > 0");
  }
  const Eigen::VectorXcd ev = Spectrum(generator);

  // Collapse numerically repeated eigenvalues.
  std::vector<Complex> distinct;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    bool seen = false;
    for (const auto& u : distinct) {
      if (std::abs(u - ev(k)) <= tol.distinct) {
        seen = true;
        break;
      }
    }
    if (!seen) distinct.push_back(ev(k));
  }

  const double period = 2.0 * std::numbers::pi / dt;
  AliasingResult result;
  for (std::size_t a = 0; a < distinct.size(); ++a) {
    for (std::size_t b = a + 1; b < distinct.size(); ++b) {
      const Complex gap = distinct[a] - distinct[b];
      if (std::abs(gap.real()) > tol.real_part) continue;
      const double im = std::abs(gap.imag());
      const double s = std::round(im / period);
      if (s >= 1.0 && std::abs(im - s * period) <= tol.modulus) {
        result.ok = false;
        result.offending.emplace_back(distinct[a], distinct[b]);
      }
    }
  }
  return result;
}

Evolver::Evolver(const Superoperator& generator, double max_condition)
    : generator_(generator) {
  RequireGenerator(generator_, "evolver");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(generator_.matrix, true);
  if (eig.info() != Eigen::Success) return;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eig.eigenvectors());
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (!(smallest > 0.0) || s(0) / smallest > max_condition) return;
  eigenvalues_ = eig.eigenvalues();
  eigenvectors_ = eig.eigenvectors();
  eigenvectors_lu_.compute(eigenvectors_);
  spectral_ = true;
}

Eigen::MatrixXcd Evolver::Coordinates(const Eigen::MatrixXcd& X) const {
  if (!spectral_) {
    throw InvalidInputError("evolver: no eigendecomposition available");
  }
  return eigenvectors_lu_.solve(X);
}

OperatorVector Evolver::Apply(double t, const OperatorVector& x) const {
  if (!spectral_) return Propagate(generator_, t).matrix * x;
  const Eigen::VectorXcd coeff = eigenvectors_lu_.solve(x);
  const Eigen::VectorXcd phase = (eigenvalues_ * t).array().exp().matrix();
  return eigenvectors_ * coeff.cwiseProduct(phase);
}

Eigen::MatrixXcd Evolver::Apply(double t, const Eigen::MatrixXcd& X) const {
  if (!spectral_) return Propagate(generator_, t).matrix * X;
  const Eigen::MatrixXcd coeff = eigenvectors_lu_.solve(X);
  const Eigen::VectorXcd phase = (eigenvalues_ * t).array().exp().matrix();
  return eigenvectors_ * (phase.asDiagonal() * coeff);
}

}  // namespace dqst
