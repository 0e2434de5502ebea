#pragma once

// Linear-inversion state reconstruction, its mean-squared-error bound, and
// estimation of unmeasured observables from measured ones.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqst/linops.h"
#include "dqst/selection.h"

namespace dqst {

struct DesignMatrix {
  int dim = 0;
  // Row j is (e^{Lt_j}x_{i_j})†, so rows·vec(ρ) = expectation vector.
  Eigen::MatrixXcd rows;
};

DesignMatrix BuildDesignMatrix(const MeasurementPlan& plan);

/// Rows from explicit evolved-observable vectors.
DesignMatrix BuildDesignMatrix(const std::vector<OperatorVector>& evolved);

struct ReconstructionOptions {
  // Clip negative eigenvalues and renormalize (nearest density matrix in
  // Frobenius norm). Off by default: plain linear inversion.
  bool psd_project = false;
  RankPolicy rank_policy;
};

struct ReconstructionResult {
  OperatorMatrix rho;
  // cond(O†O) = (σ_max/σ_min)².
  double condition_number = 0.0;
  // ‖O r̂ − ŷ‖.
  double residual_norm = 0.0;
  int rank = 0;
};

/// Factorizes a design matrix once for repeated reconstructions. Throws
/// InfeasibleError when rank(O) < d².
class StateEstimator {
 public:
  explicit StateEstimator(const DesignMatrix& O,
                          const ReconstructionOptions& options = {});

  ReconstructionResult Estimate(const Eigen::VectorXd& estimates) const;

  int rank() const { return rank_; }
  double condition_number() const { return condition_number_; }

 private:
  DesignMatrix design_;
  ReconstructionOptions options_;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd_;
  int rank_ = 0;
  double condition_number_ = 0.0;
};

/// Least-squares solve of O r = ŷ via an SVD, then ρ̂ = (R + R†)/2 with
/// R = unvec(r̂). Throws InfeasibleError when rank(O) < d².
ReconstructionResult EstimateState(const DesignMatrix& O,
                                   const Eigen::VectorXd& estimates,
                                   const ReconstructionOptions& options = {});

/// Nearest unit-trace positive semidefinite matrix to a Hermitian ρ.
OperatorMatrix ProjectToDensityMatrix(const OperatorMatrix& rho);

/// (k/P)·tr[(O†O)⁻¹] with k the worst single-shot variance.
double MseBound(const DesignMatrix& O, double k, long long shots,
                const RankPolicy& policy = {});

/// tr[(O†O)⁻¹O†ΣO(O†O)⁻¹]/P with Σ = diag(variances).
double MseExact(const DesignMatrix& O, const Eigen::VectorXd& variances,
                long long shots, const RankPolicy& policy = {});

struct TargetCoefficients {
  // Real coefficients with Z ≈ Σ_j α_j X_{i_j}[t_j].
  Eigen::VectorXd alpha;
  // Indices into the candidate list, in the order of alpha.
  std::vector<int> chosen;
  // ‖Z − Σ α_j X_j[t_j]‖_HS.
  double residual = 0.0;
};

/// Real least-squares fit of vec(Z) by all candidate evolved observables.
/// Throws InfeasibleError when the relative residual exceeds `tol`.
TargetCoefficients SolveTargetCoefficients(
    const std::vector<OperatorVector>& evolved, const OperatorMatrix& Z,
    double tol = 1e-3);

/// Greedy minimal support: adds the candidate that most reduces the
/// residual (earliest candidate on ties) until it drops below tol·‖Z‖.
TargetCoefficients MinimalSupportCoefficients(
    const std::vector<OperatorVector>& evolved, const OperatorMatrix& Z,
    double tol = 1e-3);

/// ẑ = Σ α_j ŷ_j.
double TargetEstimate(const Eigen::VectorXd& alpha,
                      const Eigen::VectorXd& estimates);

}  // namespace dqst
