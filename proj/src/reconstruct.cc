#include "dqst/reconstruct.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dqst/errors.h"

namespace dqst {
namespace {

struct DesignSvd {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd;
  int rank = 0;
};

DesignSvd FullRankSvd(const DesignMatrix& O, const RankPolicy& policy,
                      unsigned int options) {
  const int d2 = O.dim * O.dim;
  if (O.rows.cols() != d2) {
    throw DimensionError("design matrix must have d² columns");
  }
  if (!O.rows.allFinite()) {
    throw NumericalError("design matrix has non-finite entries");
  }
  DesignSvd out{Eigen::BDCSVD<Eigen::MatrixXcd>(O.rows, options), 0};
  const auto& s = out.svd.singularValues();
  const double threshold = policy.Threshold(
      O.rows.rows(), O.rows.cols(), s.size() > 0 ? s(0) : 0.0);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > threshold) ++out.rank;
  }
  if (out.rank < d2) {
    std::ostringstream msg;
    msg << "design matrix has rank " << out.rank << " < d² = " << d2
        << "; the state is not uniquely determined by the data";
    throw InfeasibleError("rank_deficient_design", out.rank, d2, msg.str());
  }
  return out;
}

// Real least squares for Σ_j α_j e_j ≈ z over the given columns.
Eigen::VectorXd RealLeastSquares(const Eigen::MatrixXcd& E,
                                 const OperatorVector& z) {
  const Eigen::Index n = E.rows();
  Eigen::MatrixXd A(2 * n, E.cols());
  A.topRows(n) = E.real();
  A.bottomRows(n) = E.imag();
  Eigen::VectorXd b(2 * n);
  b.head(n) = z.real();
  b.tail(n) = z.imag();
  return A.completeOrthogonalDecomposition().solve(b);
}

Eigen::MatrixXcd StackColumns(const std::vector<OperatorVector>& evolved,
                              const std::vector<int>& which) {
  Eigen::MatrixXcd E(evolved.front().size(),
                     static_cast<Eigen::Index>(which.size()));
  for (std::size_t j = 0; j < which.size(); ++j) {
    E.col(static_cast<Eigen::Index>(j)) = evolved[which[j]];
  }
  return E;
}

void RequireCandidates(const std::vector<OperatorVector>& evolved,
                       const OperatorMatrix& Z) {
  if (evolved.empty()) {
    throw InvalidInputError("target fit needs at least one candidate");
  }
  RequireHermitian(Z, "target observable");
  for (const auto& e : evolved) {
    if (e.size() != Z.size()) {
      throw DimensionError("candidate and target dimensions differ");
    }
  }
}

}  // namespace

DesignMatrix BuildDesignMatrix(const std::vector<OperatorVector>& evolved) {
  if (evolved.empty()) throw InvalidInputError("design matrix: empty plan");
  DesignMatrix O;
  O.dim = DimFromVectorLength(evolved.front().size());
  O.rows.resize(static_cast<Eigen::Index>(evolved.size()),
                evolved.front().size());
  for (std::size_t j = 0; j < evolved.size(); ++j) {
    if (evolved[j].size() != evolved.front().size()) {
      throw DimensionError("design matrix: rows have different lengths");
    }
    O.rows.row(static_cast<Eigen::Index>(j)) = evolved[j].adjoint();
  }
  return O;
}

DesignMatrix BuildDesignMatrix(const MeasurementPlan& plan) {
  std::vector<OperatorVector> evolved;
  evolved.reserve(plan.entries.size());
  for (const auto& e : plan.entries) evolved.push_back(e.evolved);
  return BuildDesignMatrix(evolved);
}

StateEstimator::StateEstimator(const DesignMatrix& O,
                               const ReconstructionOptions& options)
    : design_(O), options_(options) {
  DesignSvd ds = FullRankSvd(O, options.rank_policy,
                             Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd_ = std::move(ds.svd);
  rank_ = ds.rank;
  const auto& s = svd_.singularValues();
  const double ratio = s(0) / s(s.size() - 1);
  condition_number_ = ratio * ratio;
}

ReconstructionResult StateEstimator::Estimate(
    const Eigen::VectorXd& estimates) const {
  if (estimates.size() != design_.rows.rows()) {
    throw DimensionError("estimate count does not match design rows");
  }
  if (!estimates.allFinite()) {
    throw InvalidInputError("estimates contain non-finite values");
  }
  const Eigen::VectorXcd y = estimates.cast<Complex>();
  const Eigen::VectorXcd r = svd_.solve(y);
  ReconstructionResult result;
  result.rank = rank_;
  result.condition_number = condition_number_;
  result.residual_norm = (design_.rows * r - y).norm();
  const OperatorMatrix R = Unvec(r, design_.dim);
  result.rho = 0.5 * (R + R.adjoint());
  if (options_.psd_project) result.rho = ProjectToDensityMatrix(result.rho);
  return result;
}

ReconstructionResult EstimateState(const DesignMatrix& O,
                                   const Eigen::VectorXd& estimates,
                                   const ReconstructionOptions& options) {
  if (estimates.size() != O.rows.rows()) {
    throw DimensionError("estimate count does not match design rows");
  }
  return StateEstimator(O, options).Estimate(estimates);
}

OperatorMatrix ProjectToDensityMatrix(const OperatorMatrix& rho) {
  RequireHermitian(rho, "state estimate", 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
      0.5 * (rho + rho.adjoint()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("state estimate diagonalization failed");
  }
  // Euclidean projection of the spectrum onto the probability simplex.
  Eigen::VectorXd w = eig.eigenvalues();
  std::vector<double> sorted(w.data(), w.data() + w.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  w = (w.array() - shift).cwiseMax(0.0);
  const auto& V = eig.eigenvectors();
  const OperatorMatrix out = V * w.cast<Complex>().asDiagonal() * V.adjoint();
  return 0.5 * (out + out.adjoint());
}

double MseBound(const DesignMatrix& O, double k, long long shots,
                const RankPolicy& policy) {
  if (k < 0.0) throw InvalidInputError("variance bound k must be >= 0");
  if (shots < 1) throw InvalidInputError("shot count must be >= 1");
  const DesignSvd ds = FullRankSvd(O, policy, 0);
  const double trace_inverse =
      ds.svd.singularValues().array().square().inverse().sum();
  return k / static_cast<double>(shots) * trace_inverse;
}

double MseExact(const DesignMatrix& O, const Eigen::VectorXd& variances,
                long long shots, const RankPolicy& policy) {
  if (variances.size() != O.rows.rows()) {
    throw DimensionError("variance count does not match design rows");
  }
  if (shots < 1) throw InvalidInputError("shot count must be >= 1");
  const DesignSvd ds = FullRankSvd(O, policy, Eigen::ComputeThinU);
  const auto& s = ds.svd.singularValues();
  const Eigen::MatrixXcd& U = ds.svd.matrixU();
  // tr[(O†O)⁻¹O†ΣO(O†O)⁻¹] = Σ_k σ_k⁻² Σ_j Σ_jj |U_jk|².
  double total = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    total += variances.dot(U.col(k).cwiseAbs2()) / (s(k) * s(k));
  }
  return total / static_cast<double>(shots);
}

TargetCoefficients SolveTargetCoefficients(
    const std::vector<OperatorVector>& evolved, const OperatorMatrix& Z,
    double tol) {
  RequireCandidates(evolved, Z);
  const OperatorVector z = Vec(Z);
  TargetCoefficients out;
  for (int j = 0; j < static_cast<int>(evolved.size()); ++j) {
    out.chosen.push_back(j);
  }
  const Eigen::MatrixXcd E = StackColumns(evolved, out.chosen);
  out.alpha = RealLeastSquares(E, z);
  out.residual = (E * out.alpha.cast<Complex>() - z).norm();
  if (out.residual > tol * z.norm()) {
    std::ostringstream msg;
    msg << "target is not spanned by the evolved observables (relative "
           "residual "
        << out.residual / z.norm() << " > " << tol << ")";
    throw InfeasibleError("target_not_in_observable_subspace", 0, 0,
                          msg.str());
  }
  return out;
}

TargetCoefficients MinimalSupportCoefficients(
    const std::vector<OperatorVector>& evolved, const OperatorMatrix& Z,
    double tol) {
  RequireCandidates(evolved, Z);
  const OperatorVector z = Vec(Z);
  const double goal = tol * z.norm();
  TargetCoefficients out;
  out.alpha = Eigen::VectorXd(0);
  out.residual = z.norm();
  std::vector<bool> used(evolved.size(), false);
  while (out.residual > goal && out.chosen.size() < evolved.size()) {
    int best = -1;
    TargetCoefficients best_fit;
    for (int j = 0; j < static_cast<int>(evolved.size()); ++j) {
      if (used[j]) continue;
      TargetCoefficients trial;
      trial.chosen = out.chosen;
      trial.chosen.push_back(j);
      const Eigen::MatrixXcd E = StackColumns(evolved, trial.chosen);
      trial.alpha = RealLeastSquares(E, z);
      trial.residual = (E * trial.alpha.cast<Complex>() - z).norm();
      const double slack = 1e-12 * std::max(1.0, z.norm());
      if (best < 0 || trial.residual < best_fit.residual - slack) {
        best = j;
        best_fit = std::move(trial);
      }
    }
    if (best < 0 || !(best_fit.residual < out.residual)) break;
    used[best] = true;
    out = std::move(best_fit);
  }
  if (out.residual > goal) {
    std::ostringstream msg;
    msg << "target is not spanned by the candidates (relative residual "
        << out.residual / z.norm() << " > " << tol << ")";
    throw InfeasibleError("target_not_in_observable_subspace", 0, 0,
                          msg.str());
  }
  return out;
}

double TargetEstimate(const Eigen::VectorXd& alpha,
                      const Eigen::VectorXd& estimates) {
  if (alpha.size() != estimates.size()) {
    throw DimensionError("coefficient and estimate counts differ");
  }
  return alpha.dot(estimates);
}

}  // namespace dqst
