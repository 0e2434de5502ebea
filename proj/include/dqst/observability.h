#pragma once

// Observability analysis of the Heisenberg-picture sampled system: which
// operators (and hence which state components) the measurement records can
// determine.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqst/dynamics.h"
#include "dqst/linops.h"

namespace dqst {

/// The measurable observables 𝒳. Always contains the identity and is
/// linearly independent.
class MeasurementSet {
 public:
  // Empty placeholder; use Create or WithIdentity for a usable set.
  MeasurementSet() = default;

  /// Validates Hermiticity, common dimension, presence of the identity and
  /// linear independence. Labels default to "X0", "X1", ...
  static MeasurementSet Create(std::vector<OperatorMatrix> observables,
                               std::vector<std::string> labels = {});

  /// Same as Create, but prepends the identity (label "I") when absent.
  static MeasurementSet WithIdentity(std::vector<OperatorMatrix> observables,
                                     std::vector<std::string> labels = {});

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(observables_.size()); }
  const std::vector<OperatorMatrix>& observables() const {
    return observables_;
  }
  const OperatorMatrix& observable(int i) const { return observables_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(i); }
  int identity_index() const { return identity_index_; }

  /// d²×|𝒳| matrix whose columns are vec(X_i).
  Eigen::MatrixXcd VecMatrix() const;

 private:
  int dim_ = 0;
  std::vector<OperatorMatrix> observables_;
  std::vector<std::string> labels_;
  int identity_index_ = -1;
};

struct KrylovResult {
  // Orthonormal columns spanning span{Aᵏxᵢ}.
  Eigen::MatrixXcd basis;
  // Number of power steps that enlarged the span.
  int k_stop = 0;
  // smallest_kept / largest_dropped are relative to the block scale at
  // which each decision was taken (‖x‖ for k = 0, ‖A‖₂ afterwards).
  RankAudit audit;
};

/// Block Krylov iteration with deflation: starting from the columns of
/// `start`, repeatedly applies A to the newest directions, orthogonalizes
/// against the accumulated basis and keeps the singular directions above
/// the rank threshold. Stops when a step adds nothing.
KrylovResult KrylovBasis(const Eigen::MatrixXcd& A,
                         const Eigen::MatrixXcd& start,
                         const RankPolicy& policy = {});

/// The stacked matrix [x̂, Âx̂, Â²x̂, …] with `depth` powers, each block
/// column-normalized to unit length. Same column span as KrylovBasis for
/// depth ≥ k_stop; intended for small systems and cross-checks.
Eigen::MatrixXcd KalmanMatrix(const Eigen::MatrixXcd& A,
                              const Eigen::MatrixXcd& start, int depth);

struct ObservabilityReport {
  int rank = 0;
  int d2 = 0;
  bool observable = false;
  // Orthonormal columns spanning 𝒪.
  Eigen::MatrixXcd obs_basis;
  // Orthonormal columns spanning 𝒩 = 𝒪⊥, Hermitian and traceless when
  // unvectorized (see hermitian_non_obs_basis).
  Eigen::MatrixXcd non_obs_basis;
  bool hermitian_non_obs_basis = false;
  RankAudit audit;
  int k_stop = 0;
  // Krylov directions removed by the modal check (see KalmanReport).
  int modal_deflated = 0;

  int n_nonobs() const { return d2 - rank; }
};

/// The matrix whose powers drive the Krylov iteration: L for a generator,
/// Φ̂ for a one-step propagator.
const Eigen::MatrixXcd& DynamicsMatrix(const Superoperator& op);

/// Kalman rank test: observable iff rank span{Aᵏxᵢ} = d². The Krylov
/// span is then cleared of eigen-directions v of A† with X†v ≈ 0 (the
/// modal form of the PBH test). Those directions are orthogonal to 𝒪 in
/// exact arithmetic, but a Krylov iteration can pick them up from roundoff
/// that it amplifies when the spectrum is closely spaced.
ObservabilityReport KalmanReport(const Superoperator& A,
                                 const MeasurementSet& X,
                                 const RankPolicy& policy = {});

struct PbhResult {
  bool observable = true;
  // First eigenvalue of A† at which rank [μI − A†; X†] < d².
  std::optional<Complex> witness;
  // Smallest rank seen over the tested eigenvalues.
  int min_rank = 0;
};

/// Popov–Belevitch–Hautus test over the distinct eigenvalues of A†
/// (deduplicated at `dedup_tol`).
PbhResult PbhTest(const Superoperator& A, const MeasurementSet& X,
                  const RankPolicy& policy = {}, double dedup_tol = 1e-8);

struct TargetCheck {
  bool reconstructable = false;
  // ‖Π⊥vec(Z)‖ / ‖vec(Z)‖ with Π⊥ the projector onto 𝒩.
  double relative_residual = 0.0;
};

/// Z can be estimated from the records iff vec(Z) ∈ 𝒪, i.e. appending it
/// to the observable basis does not raise the numerical rank.
TargetCheck TargetReconstructable(const ObservabilityReport& report,
                                  const OperatorMatrix& Z,
                                  const RankPolicy& policy = {});

struct TrialSystem {
  Superoperator dynamics;
  MeasurementSet measurements;
};

using TrialFactory = std::function<TrialSystem(std::mt19937_64& rng)>;

struct GenericitySummary {
  int n_trials = 0;
  int n_observable = 0;
  int n_failed = 0;
  std::map<int, int> rank_histogram;
  std::vector<std::string> failures;
};

/// Runs `n_trials` independent draws. Trial j uses a generator seeded with
/// DeriveSeed(master_seed, j), so the summary depends only on the seed.
/// Exceptions thrown by the factory are recorded as failed trials.
GenericitySummary GenericityTrials(const TrialFactory& factory, int n_trials,
                                   std::uint64_t master_seed,
                                   const RankPolicy& policy = {});

struct CountingBounds {
  // |𝒳| ≥ d, necessary for DQST under unitary dynamics.
  bool unitary_possible = false;
  // kᴺ ≤ N·k² − N − 1, necessary for single-site observables under unitary
  // dynamics on N subsystems of dimension k.
  std::optional<bool> multipartite_possible;
  long long multipartite_lhs = 0;
  long long multipartite_rhs = 0;
};

CountingBounds EvaluateCountingBounds(int d, int n_obs,
                                      std::optional<std::pair<int, int>>
                                          multipartite = std::nullopt);

}  // namespace dqst
