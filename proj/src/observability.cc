#include "dqst/observability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dqst/errors.h"
#include "dqst/random.h"

namespace dqst {
namespace {

Eigen::MatrixXcd NormalizeColumns(const Eigen::MatrixXcd& M) {
  Eigen::MatrixXcd out = M;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double n = out.col(j).norm();
    if (n > 0.0) out.col(j) /= n;
  }
  return out;
}

double SpectralNorm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

void NoteKept(RankAudit& audit, double value) {
  if (audit.smallest_kept == 0.0 || value < audit.smallest_kept) {
    audit.smallest_kept = value;
  }
}

void NoteDropped(RankAudit& audit, double value) {
  audit.largest_dropped = std::max(audit.largest_dropped, value);
}

// Columns of U·diag(σ) above the threshold, recording the decision.
Eigen::MatrixXcd KeepAbove(const Eigen::MatrixXcd& W, double threshold,
                           double scale, RankAudit& audit) {
  if (W.cols() == 0) return Eigen::MatrixXcd(W.rows(), 0);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(W, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index keep = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > threshold) {
      ++keep;
      NoteKept(audit, s(k) / scale);
    } else {
      NoteDropped(audit, s(k) / scale);
    }
  }
  return svd.matrixU().leftCols(keep);
}

void RequireSameDim(const Superoperator& A, const MeasurementSet& X) {
  if (A.dim != X.dim() || A.matrix.rows() != A.size() ||
      A.matrix.cols() != A.size()) {
    std::ostringstream msg;
    msg << "dynamics acts on d=" << A.dim << " but observables have d="
        << X.dim();
    throw DimensionError(msg.str());
  }
}

// Eigenvalues of A within this fraction of ‖A‖ form one cluster, and a
// cluster's eigenvector span must be A†-invariant to the same accuracy.
constexpr double kModalClusterTol = 1e-8;

// Orthonormal basis of the eigen-directions v of A† with X†v ≈ 0. Every
// such v is orthogonal to all AᵏX, hence to 𝒪. Clusters whose computed
// eigenvectors fail the invariance check are skipped, so the result can
// only miss directions, never invent them.
Eigen::MatrixXcd UnseenModes(const Eigen::MatrixXcd& A,
                             const Eigen::MatrixXcd& X, double norm_a,
                             const RankPolicy& policy) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXcd At = A.adjoint();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(At, true);
  if (eig.info() != Eigen::Success) return Eigen::MatrixXcd(n, 0);
  const Eigen::VectorXcd& lambda = eig.eigenvalues();

  std::vector<int> cluster(n, -1);
  int n_clusters = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = n_clusters;
    std::vector<Eigen::Index> pending = {i};
    while (!pending.empty()) {
      const Eigen::Index a = pending.back();
      pending.pop_back();
      for (Eigen::Index b = 0; b < n; ++b) {
        if (cluster[b] < 0 &&
            std::abs(lambda(a) - lambda(b)) <= kModalClusterTol * norm_a) {
          cluster[b] = n_clusters;
          pending.push_back(b);
        }
      }
    }
    ++n_clusters;
  }

  const Eigen::MatrixXcd outputs = NormalizeColumns(X).adjoint();
  const double threshold = policy.Threshold(n, X.cols(), 1.0);
  std::vector<Eigen::VectorXcd> unseen;
  for (int c = 0; c < n_clusters; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (cluster[i] == c) members.push_back(i);
    }
    Eigen::MatrixXcd V(n, static_cast<Eigen::Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) {
      V.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(members[k]);
    }
    const Eigen::MatrixXcd Vq = OrthonormalSpan(V, policy);
    const Eigen::MatrixXcd AV = At * Vq;
    if ((AV - Vq * (Vq.adjoint() * AV)).norm() > kModalClusterTol * norm_a) {
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(outputs * Vq, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    for (Eigen::Index k = 0; k < Vq.cols(); ++k) {
      if (k >= s.size() || s(k) <= threshold) {
        unseen.push_back(Vq * svd.matrixV().col(k));
      }
    }
  }
  Eigen::MatrixXcd W(n, static_cast<Eigen::Index>(unseen.size()));
  for (std::size_t k = 0; k < unseen.size(); ++k) {
    W.col(static_cast<Eigen::Index>(k)) = unseen[k];
  }
  return W.cols() > 0 ? OrthonormalSpan(W, policy) : W;
}

// Real Gram-Schmidt over Hermitian parts of the kernel vectors, so that the
// returned basis consists of Hermitian operators.
Eigen::MatrixXcd HermitianSplit(const Eigen::MatrixXcd& kernel, int d) {
  const Eigen::Index n = kernel.rows();
  const Eigen::Index want = kernel.cols();
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd out(n, want);
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < kernel.cols() && count < want; ++j) {
    const OperatorMatrix M = Unvec(kernel.col(j), d);
    const OperatorMatrix parts[2] = {0.5 * (M + M.adjoint()),
                                     0.5 * i * (M - M.adjoint())};
    for (const auto& part : parts) {
      if (count == want) break;
      OperatorVector c = Vec(0.5 * (part + part.adjoint()));
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index q = 0; q < count; ++q) {
          c -= out.col(q).dot(c).real() * out.col(q);
        }
      }
      const double norm = c.norm();
      if (norm > 1e-8) out.col(count++) = c / norm;
    }
  }
  return out.leftCols(count);
}

}  // namespace

MeasurementSet MeasurementSet::Create(std::vector<OperatorMatrix> observables,
                                      std::vector<std::string> labels) {
  if (observables.empty()) {
    throw InvalidInputError("measurement set is empty");
  }
  if (!labels.empty() && labels.size() != observables.size()) {
    throw InvalidInputError("measurement set: label count does not match");
  }
  MeasurementSet set;
  set.dim_ = static_cast<int>(observables.front().rows());
  const bool default_labels = labels.empty();
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const std::string name =
        default_labels ? "X" + std::to_string(k) : labels[k];
    if (observables[k].rows() != set.dim_ ||
        observables[k].cols() != set.dim_) {
      throw DimensionError("observable '" + name + "' has the wrong size");
    }
    RequireHermitian(observables[k], "observable '" + name + "'");
    if (default_labels) labels.push_back(name);
  }
  const OperatorMatrix I = OperatorMatrix::Identity(set.dim_, set.dim_);
  for (std::size_t k = 0; k < observables.size(); ++k) {
    // Any nonzero multiple of the identity plays the role of X₀ = I.
    const Complex scale = observables[k].trace() / static_cast<double>(set.dim_);
    if (std::abs(scale) > 0.0 &&
        (observables[k] - scale * I).cwiseAbs().maxCoeff() <= kHermiticityTol) {
      set.identity_index_ = static_cast<int>(k);
      break;
    }
  }
  if (set.identity_index_ < 0) {
    throw InvalidInputError("measurement set must contain the identity");
  }
  set.observables_ = std::move(observables);
  set.labels_ = std::move(labels);
  const auto rank = NumericalRank(NormalizeColumns(set.VecMatrix())).rank();
  if (rank != set.size()) {
    std::ostringstream msg;
    msg << "measurement set is linearly dependent (rank " << rank << " < "
        << set.size() << ")";
    throw InvalidInputError(msg.str());
  }
  return set;
}

MeasurementSet MeasurementSet::WithIdentity(
    std::vector<OperatorMatrix> observables, std::vector<std::string> labels) {
  if (observables.empty()) {
    throw InvalidInputError("measurement set is empty");
  }
  const auto d = observables.front().rows();
  const OperatorMatrix I = OperatorMatrix::Identity(d, d);
  for (const auto& X : observables) {
    if (X.rows() == d && X.cols() == d && (X - I).cwiseAbs().maxCoeff() == 0) {
      return Create(std::move(observables), std::move(labels));
    }
  }
  if (!labels.empty() && labels.size() != observables.size()) {
    throw InvalidInputError("measurement set: label count does not match");
  }
  observables.insert(observables.begin(), I);
  if (!labels.empty()) labels.insert(labels.begin(), "I");
  return Create(std::move(observables), std::move(labels));
}

Eigen::MatrixXcd MeasurementSet::VecMatrix() const {
  Eigen::MatrixXcd M(static_cast<Eigen::Index>(dim_) * dim_, size());
  for (int k = 0; k < size(); ++k) M.col(k) = Vec(observables_[k]);
  return M;
}

KrylovResult KrylovBasis(const Eigen::MatrixXcd& A,
                         const Eigen::MatrixXcd& start,
                         const RankPolicy& policy) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || start.rows() != n) {
    throw DimensionError("krylov: operator and start vectors do not match");
  }
  if (!A.allFinite() || !start.allFinite()) {
    throw NumericalError("krylov: non-finite input");
  }
  KrylovResult result;
  RankAudit& audit = result.audit;

  // Start block: unit-length columns, so the scale is 1.
  double threshold = policy.Threshold(n, n, 1.0);
  Eigen::MatrixXcd Q = KeepAbove(NormalizeColumns(start), threshold, 1.0, audit);
  Eigen::MatrixXcd fresh = Q;

  const double norm_a = SpectralNorm(A);
  threshold = policy.Threshold(n, n, norm_a);
  while (fresh.cols() > 0 && Q.cols() < n && norm_a > 0.0) {
    Eigen::MatrixXcd W = A * fresh;
    for (int pass = 0; pass < 2; ++pass) W -= Q * (Q.adjoint() * W);
    fresh = KeepAbove(W, threshold, norm_a, audit);
    if (fresh.cols() == 0) break;
    if (Q.cols() + fresh.cols() > n) fresh = fresh.leftCols(n - Q.cols());
    Eigen::MatrixXcd grown(n, Q.cols() + fresh.cols());
    grown << Q, fresh;
    Q = std::move(grown);
    ++result.k_stop;
  }
  audit.rank = static_cast<int>(Q.cols());
  audit.threshold = threshold;
  result.basis = std::move(Q);
  return result;
}

Eigen::MatrixXcd KalmanMatrix(const Eigen::MatrixXcd& A,
                              const Eigen::MatrixXcd& start, int depth) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || start.rows() != n) {
    throw DimensionError("kalman matrix: operator and start vectors differ");
  }
  if (depth < 0) throw InvalidInputError("kalman matrix: negative depth");
  const Eigen::Index m = start.cols();
  Eigen::MatrixXcd K(n, m * (depth + 1));
  Eigen::MatrixXcd block = NormalizeColumns(start);
  for (int k = 0; k <= depth; ++k) {
    K.middleCols(k * m, m) = block;
    block = NormalizeColumns(A * block);
  }
  return K;
}

const Eigen::MatrixXcd& DynamicsMatrix(const Superoperator& op) {
  return op.matrix;
}

ObservabilityReport KalmanReport(const Superoperator& A,
                                 const MeasurementSet& X,
                                 const RankPolicy& policy) {
  RequireSameDim(A, X);
  const KrylovResult krylov =
      KrylovBasis(DynamicsMatrix(A), X.VecMatrix(), policy);

  ObservabilityReport report;
  report.d2 = A.size();
  report.obs_basis = krylov.basis;
  report.audit = krylov.audit;
  report.k_stop = krylov.k_stop;

  const double norm_a = SpectralNorm(DynamicsMatrix(A));
  const Eigen::MatrixXcd W =
      norm_a > 0.0 ? UnseenModes(DynamicsMatrix(A), X.VecMatrix(), norm_a, policy)
                   : Eigen::MatrixXcd(report.d2, 0);
  if (W.cols() > 0 && krylov.basis.cols() > 0) {
    // Directions of the Krylov span lying mostly in the unseen modes are
    // dropped; the rest of the span is kept as computed.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W.adjoint() * krylov.basis,
                                           Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index drop = 0;
    while (drop < s.size() && s(drop) > std::sqrt(0.5)) ++drop;
    if (drop > 0) {
      report.obs_basis = krylov.basis * svd.matrixV().rightCols(
                                            krylov.basis.cols() - drop);
      report.modal_deflated = static_cast<int>(drop);
    }
  }
  report.rank = static_cast<int>(report.obs_basis.cols());
  report.observable = report.rank == report.d2;

  const Eigen::MatrixXcd kernel = OrthogonalComplement(report.obs_basis);
  const Eigen::MatrixXcd split = HermitianSplit(kernel, A.dim);
  if (split.cols() == kernel.cols()) {
    report.non_obs_basis = split;
    report.hermitian_non_obs_basis = true;
  } else {
    report.non_obs_basis = kernel;
  }
  return report;
}

PbhResult PbhTest(const Superoperator& A, const MeasurementSet& X,
                  const RankPolicy& policy, double dedup_tol) {
  RequireSameDim(A, X);
  const Eigen::Index n = A.size();
  const Eigen::MatrixXcd At = DynamicsMatrix(A).adjoint();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(At, false);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("pbh: eigenvalue computation did not converge");
  }
  std::vector<Complex> distinct;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex mu = eig.eigenvalues()(k);
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](Complex u) {
                                    return std::abs(u - mu) <= dedup_tol;
                                  });
    if (!seen) distinct.push_back(mu);
  }

  const Eigen::MatrixXcd outputs = NormalizeColumns(X.VecMatrix()).adjoint();
  Eigen::MatrixXcd stacked(n + outputs.rows(), n);
  stacked.bottomRows(outputs.rows()) = outputs;
  PbhResult result;
  result.min_rank = static_cast<int>(n);
  for (const Complex& mu : distinct) {
    stacked.topRows(n) = mu * Eigen::MatrixXcd::Identity(n, n) - At;
    const int rank = NumericalRank(stacked, policy).rank();
    result.min_rank = std::min(result.min_rank, rank);
    if (rank < n && result.observable) {
      result.observable = false;
      result.witness = mu;
    }
  }
  return result;
}

TargetCheck TargetReconstructable(const ObservabilityReport& report,
                                  const OperatorMatrix& Z,
                                  const RankPolicy& policy) {
  RequireHermitian(Z, "target observable");
  if (static_cast<int>(Z.size()) != report.d2) {
    throw DimensionError("target observable does not match the system size");
  }
  const OperatorVector z = Vec(Z);
  const double norm = z.norm();
  TargetCheck check;
  if (norm == 0.0) {
    check.reconstructable = true;
    return check;
  }
  const OperatorVector unit = z / norm;
  const Eigen::MatrixXcd& Q = report.obs_basis;
  check.relative_residual = (unit - Q * (Q.adjoint() * unit)).norm();
  Eigen::MatrixXcd augmented(Q.rows(), Q.cols() + 1);
  augmented << Q, unit;
  check.reconstructable = NumericalRank(augmented, policy).rank() <= report.rank;
  return check;
}

GenericitySummary GenericityTrials(const TrialFactory& factory, int n_trials,
                                   std::uint64_t master_seed,
                                   const RankPolicy& policy) {
  if (n_trials < 1) throw InvalidInputError("genericity: n_trials must be >= 1");
  GenericitySummary summary;
  summary.n_trials = n_trials;
  for (int j = 0; j < n_trials; ++j) {
    std::mt19937_64 rng(DeriveSeed(master_seed, static_cast<std::uint64_t>(j)));
    try {
      const TrialSystem system = factory(rng);
      const auto report = KalmanReport(system.dynamics, system.measurements,
                                       policy);
      ++summary.rank_histogram[report.rank];
      if (report.observable) ++summary.n_observable;
    } catch (const std::exception& e) {
      ++summary.n_failed;
      summary.failures.push_back("trial " + std::to_string(j) + ": " +
                                 e.what());
    }
  }
  return summary;
}

CountingBounds EvaluateCountingBounds(
    int d, int n_obs, std::optional<std::pair<int, int>> multipartite) {
  if (d < 2) throw InvalidInputError("counting bounds: d must be >= 2");
  if (n_obs < 0) throw InvalidInputError("counting bounds: negative |X|");
  CountingBounds bounds;
  bounds.unitary_possible = n_obs >= d;
  if (multipartite) {
    const auto [N, k] = *multipartite;
    if (N < 1 || k < 2) {
      throw InvalidInputError("counting bounds: need N >= 1 and k >= 2");
    }
    long long lhs = 1;
    for (int j = 0; j < N; ++j) {
      if (lhs > std::numeric_limits<long long>::max() / k) {
        lhs = std::numeric_limits<long long>::max();
        break;
      }
      lhs *= k;
    }
    bounds.multipartite_lhs = lhs;
    bounds.multipartite_rhs =
        static_cast<long long>(N) * k * k - static_cast<long long>(N) - 1;
    bounds.multipartite_possible =
        bounds.multipartite_lhs <= bounds.multipartite_rhs;
  }
  return bounds;
}

}  // namespace dqst
