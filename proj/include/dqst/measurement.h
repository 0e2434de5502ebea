#pragma once

// Simulated data acquisition: projective measurements of observables on
// (evolved) states and finite-shot sample averages.

#include <cstdint>
#include <vector>

#include "dqst/dynamics.h"
#include "dqst/linops.h"

namespace dqst {

struct SpectralDecomposition {
  // Distinct outcomes in ascending order.
  std::vector<double> outcomes;
  std::vector<OperatorMatrix> projectors;
};

/// X = Σ_k α_k Π_k with eigenvalues closer than cluster_tol merged into one
/// outcome.
SpectralDecomposition Spectral(const OperatorMatrix& X,
                               double cluster_tol = 1e-8);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// y = tr(Xρ) and the single-shot variance tr(X²ρ) − y² (clamped at 0).
/// Throws InvalidInputError when tr ρ deviates from 1 by more than 1e-8.
Moments ExpectationAndVariance(const OperatorMatrix& X,
                               const OperatorMatrix& rho);

enum class SamplingMode {
  // Average of P outcomes drawn from the Born distribution.
  kExact,
  // One draw from N(y, σ²/P).
  kClt,
};

struct ExpectationEstimate {
  double value = 0.0;
  long long shots = 0;
  double exact_mean = 0.0;
  double variance = 0.0;
};

/// Seeded estimate of tr(Xρ) from P shots. Deterministic given the seed.
ExpectationEstimate SampleEstimate(const OperatorMatrix& X,
                                   const OperatorMatrix& rho, long long shots,
                                   std::uint64_t seed, SamplingMode mode);

/// Seeded estimate from an explicit outcome distribution (probabilities
/// are clamped at 0 and renormalized; entries below −1e-9 are rejected).
ExpectationEstimate SampleFromDistribution(const std::vector<double>& outcomes,
                                           const std::vector<double>& probs,
                                           long long shots, std::uint64_t seed,
                                           SamplingMode mode);

struct OutcomeDistribution {
  std::vector<double> outcomes;
  std::vector<double> probabilities;
};

/// Born distribution of X on the state evolved from ρ₀ for time t, from
/// Heisenberg-picture evolution only: p_k = tr(Φ_t(Π_k) ρ₀).
OutcomeDistribution EvolvedDistribution(const Evolver& evolver,
                                        const OperatorMatrix& X, double t,
                                        const OperatorMatrix& rho0);

/// Measures X at time t on the state evolved from ρ₀, using only
/// Heisenberg-picture evolution: p_k = tr(Φ_t(Π_k) ρ₀).
ExpectationEstimate SampleEvolved(const Evolver& evolver,
                                  const OperatorMatrix& X, double t,
                                  const OperatorMatrix& rho0, long long shots,
                                  std::uint64_t seed, SamplingMode mode);

/// State at time t such that tr(X ρ_t) = tr(Φ_t(X) ρ₀), i.e.
/// ρ_t = unvec(Φ̂_t† vec ρ₀).
OperatorMatrix EvolvedState(const Superoperator& propagator,
                            const OperatorMatrix& rho0);

}  // namespace dqst
