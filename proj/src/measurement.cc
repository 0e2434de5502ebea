#include "dqst/measurement.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dqst/errors.h"

namespace dqst {
namespace {

void RequireState(const OperatorMatrix& rho, int d) {
  if (rho.rows() != d || rho.cols() != d) {
    throw DimensionError("state and observable dimensions differ");
  }
  RequireHermitian(rho, "density matrix", 1e-8);
  const double trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (trace_error > 1e-8) {
    std::ostringstream msg;
    msg << "density matrix trace deviates from 1 by " << trace_error;
    throw InvalidInputError(msg.str());
  }
}

}  // namespace

SpectralDecomposition Spectral(const OperatorMatrix& X, double cluster_tol) {
  RequireHermitian(X, "observable");
  const OperatorMatrix Xh = 0.5 * (X + X.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Xh);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("observable diagonalization failed");
  }
  const auto& w = eig.eigenvalues();
  const auto& V = eig.eigenvectors();
  SpectralDecomposition out;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const OperatorMatrix dyad = V.col(k) * V.col(k).adjoint();
    if (!out.outcomes.empty() &&
        std::abs(w(k) - out.outcomes.back()) <= cluster_tol) {
      out.projectors.back() += dyad;
      continue;
    }
    out.outcomes.push_back(w(k));
    out.projectors.push_back(dyad);
  }
  // Report each cluster by the mean of its eigenvalues.
  for (std::size_t c = 0; c < out.outcomes.size(); ++c) {
    const double rank = out.projectors[c].trace().real();
    out.outcomes[c] = (Xh * out.projectors[c]).trace().real() / rank;
  }
  return out;
}

Moments ExpectationAndVariance(const OperatorMatrix& X,
                               const OperatorMatrix& rho) {
  RequireHermitian(X, "observable");
  RequireState(rho, static_cast<int>(X.rows()));
  Moments m;
  m.mean = (X * rho).trace().real();
  const double second = (X * X * rho).trace().real();
  m.variance = std::max(0.0, second - m.mean * m.mean);
  return m;
}

ExpectationEstimate SampleFromDistribution(const std::vector<double>& outcomes,
                                           const std::vector<double>& probs,
                                           long long shots, std::uint64_t seed,
                                           SamplingMode mode) {
  if (shots < 1) throw InvalidInputError("shot count must be >= 1");
  if (outcomes.size() != probs.size() || outcomes.empty()) {
    throw DimensionError("outcome and probability counts differ");
  }
  std::vector<double> p(probs.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(probs[k] >= -1e-9)) {
      std::ostringstream msg;
      msg << "negative outcome probability " << probs[k] << " (invalid state)";
      throw InvalidInputError(msg.str());
    }
    p[k] = std::max(0.0, probs[k]);
    total += p[k];
  }
  if (!(total > 0.0)) throw InvalidInputError("outcome probabilities vanish");
  ExpectationEstimate est;
  est.shots = shots;
  double second = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] /= total;
    est.exact_mean += p[k] * outcomes[k];
    second += p[k] * outcomes[k] * outcomes[k];
  }
  est.variance = std::max(0.0, second - est.exact_mean * est.exact_mean);

  std::mt19937_64 rng(seed);
  if (mode == SamplingMode::kClt) {
    est.value = est.exact_mean;
    if (est.variance > 0.0) {
      std::normal_distribution<double> normal(
          est.exact_mean, std::sqrt(est.variance / static_cast<double>(shots)));
      est.value = normal(rng);
    }
    return est;
  }
  // Multinomial counts via successive conditional binomials.
  long long remaining = shots;
  double remaining_mass = 1.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size() && remaining > 0; ++k) {
    long long count = remaining;
    if (k + 1 < p.size()) {
      const double q = remaining_mass > 0.0
                           ? std::clamp(p[k] / remaining_mass, 0.0, 1.0)
                           : 0.0;
      std::binomial_distribution<long long> binomial(remaining, q);
      count = binomial(rng);
    }
    sum += static_cast<double>(count) * outcomes[k];
    remaining -= count;
    remaining_mass -= p[k];
  }
  est.value = sum / static_cast<double>(shots);
  return est;
}

ExpectationEstimate SampleEstimate(const OperatorMatrix& X,
                                   const OperatorMatrix& rho, long long shots,
                                   std::uint64_t seed, SamplingMode mode) {
  if (shots < 1) throw InvalidInputError("shot count must be >= 1");
  RequireHermitian(X, "observable");
  RequireState(rho, static_cast<int>(X.rows()));
  const SpectralDecomposition spec = Spectral(X);
  std::vector<double> p(spec.outcomes.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = (spec.projectors[k] * rho).trace().real();
  }
  return SampleFromDistribution(spec.outcomes, p, shots, seed, mode);
}

OutcomeDistribution EvolvedDistribution(const Evolver& evolver,
                                        const OperatorMatrix& X, double t,
                                        const OperatorMatrix& rho0) {
  const int d = evolver.generator().dim;
  if (X.rows() != d) throw DimensionError("observable does not match dynamics");
  RequireState(rho0, d);
  const SpectralDecomposition spec = Spectral(X);
  Eigen::MatrixXcd projectors(static_cast<Eigen::Index>(d) * d,
                              static_cast<Eigen::Index>(spec.outcomes.size()));
  for (std::size_t k = 0; k < spec.outcomes.size(); ++k) {
    projectors.col(static_cast<Eigen::Index>(k)) = Vec(spec.projectors[k]);
  }
  const Eigen::MatrixXcd evolved = evolver.Apply(t, projectors);
  const Eigen::VectorXcd weights = evolved.adjoint() * Vec(rho0);
  OutcomeDistribution out;
  out.outcomes = spec.outcomes;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    out.probabilities.push_back(weights(k).real());
  }
  return out;
}

ExpectationEstimate SampleEvolved(const Evolver& evolver,
                                  const OperatorMatrix& X, double t,
                                  const OperatorMatrix& rho0, long long shots,
                                  std::uint64_t seed, SamplingMode mode) {
  const OutcomeDistribution dist = EvolvedDistribution(evolver, X, t, rho0);
  return SampleFromDistribution(dist.outcomes, dist.probabilities, shots, seed,
                                mode);
}

OperatorMatrix EvolvedState(const Superoperator& propagator,
                            const OperatorMatrix& rho0) {
  if (propagator.kind != SuperoperatorKind::kPropagator) {
    throw InvalidInputError("evolved state needs a propagator");
  }
  if (rho0.rows() != propagator.dim || rho0.cols() != propagator.dim) {
    throw DimensionError("state does not match the propagator dimension");
  }
  const OperatorMatrix rho =
      Unvec(propagator.matrix.adjoint() * Vec(rho0), propagator.dim);
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace dqst
