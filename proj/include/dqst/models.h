#pragma once

// Built-in physical systems, standard test states and the dissipative
// N-qubit construction in the Pauli-basis GKS form.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqst/dynamics.h"
#include "dqst/linops.h"
#include "dqst/observability.h"

namespace dqst {

struct ModelSystem {
  std::string name;
  LindbladGenerator generator;
  MeasurementSet measurements;
  // Unmeasured observable of interest, when the model defines one.
  std::optional<OperatorMatrix> target;
};

/// H = Σ_i (α_i σx_i + β_i σy_i + γ_i σz_i) + Σ_i (δ_i σx_iσx_{i+1} +
/// ε_i σz_iσz_{i+1}); noise operators η_i σ⁺_i and η_i σ⁻_i per site.
struct SpinChainParams {
  int n_sites = 4;
  std::vector<double> alpha, beta, gamma;  // n_sites each
  std::vector<double> delta, epsilon;      // n_sites − 1 each
  std::vector<double> eta;                 // n_sites; 0 disables noise
  // 0-based sites carrying the measured observables.
  std::vector<int> measured_sites = {1, 2};

  /// All Hamiltonian coefficients equal to `coefficient`, all rates `eta`.
  static SpinChainParams Uniform(int n_sites, double coefficient, double eta);

  /// Hamiltonian coefficients drawn i.i.d. standard normal.
  static SpinChainParams Random(int n_sites, double eta, std::mt19937_64& rng);
};

/// 𝒳 holds all products of {I, σx, σy, σz} on the measured sites
/// (4^|sites| operators, identity first), labelled by full Pauli strings.
ModelSystem SpinChain(const SpinChainParams& params);

OperatorMatrix SpinChainHamiltonian(const SpinChainParams& params);

/// Electron-nuclear NV model on (E_el, s_el, s_N), d = 8. Frequencies in
/// MHz, field in G, so times are in µs.
struct NvParams {
  double D_e = 1420.0;
  double D_g = 2870.0;
  double Q = 4.945;
  double A_e = 40.0;
  double A_g = 2.2;
  double g_el = 2.8;
  double g_n = 3.08e-4;
  double B = 0.0;
  double gamma_d = 77.0;
  double gamma_p = 70.0;
};

/// H = |g⟩⟨g|⊗h(D_g, A_g) + |e⟩⟨e|⊗h(D_e, A_e) with
/// h = D S_z⊗I + Q I⊗S_z + B(g_el S_z⊗I + g_n I⊗S_z)
///     + A/2 (σx⊗σx + σy⊗σy + 2 S_z⊗S_z),   S_z = (I − σz)/2,
/// decay √γ_d |g,s⟩⟨e,s|⊗I and pumping √γ_p |e,s⟩⟨g,s|⊗I for s ∈ {0, 1}.
/// 𝒳 = {I, I⊗σz⊗I}; target Z = I⊗I⊗σz.
ModelSystem NvCenter(const NvParams& params = {});

/// |0…0⟩⟨0…0| on n qubits.
OperatorMatrix ProductZeroState(int n_qubits);

/// |Ψ⟩⟨Ψ| with |Ψ⟩ = (|0…0⟩ + |1…1⟩)/√2.
OperatorMatrix GhzState(int n_qubits);

/// e^{−βH}/tr e^{−βH}; β must be finite and ≥ 0.
OperatorMatrix GibbsState(const OperatorMatrix& H, double beta = 1.0);

/// (I + I⊗I⊗σz)/8, the separable NV test state.
OperatorMatrix NvSeparableState();

/// Ψ_mn = tr[F_m 𝓛(F_n)] over an orthonormal Hermitian basis.
Eigen::MatrixXcd PsiMatrix(const LindbladGenerator& gen,
                           const OperatorBasis& basis);

/// R_ni = tr[(F_nF_i)²] − d over the non-identity raw Pauli strings.
Eigen::MatrixXd RMatrix(int n_qubits);

struct DissipativeQubitSpec {
  int n_qubits = 1;
  // Diagonal GKS entries a_11 … a_{d²−1}, all ≥ 0.
  Eigen::VectorXd rates;
  // Measured observable besides the identity.
  OperatorMatrix probe;
};

/// Traceless Hermitian Σ_{i≥1} c_i F_i with c_i i.i.d. standard normal.
OperatorMatrix GenericProbe(int n_qubits, std::mt19937_64& rng);

/// H = 0, GKS matrix diag(rates) in the raw Pauli basis, 𝒳 = {I, probe}.
ModelSystem DissipativeNQubit(const DissipativeQubitSpec& spec);

/// GUE-distributed Hermitian matrix: (G + G†)/2 with standard complex
/// normal entries in G.
OperatorMatrix RandomHermitian(int d, std::mt19937_64& rng);

/// Trials with H = RandomHermitian(d), no noise, and 𝒳 = {I} plus
/// n_observables − 1 random Hermitian observables.
TrialFactory RandomUnitaryTrials(int d, int n_observables);

/// Trials of the spin chain with standard-normal Hamiltonian coefficients.
TrialFactory RandomSpinChainTrials(int n_sites, double eta);

/// Trials of DissipativeNQubit with rates uniform in (0.1, 1.1) and a
/// GenericProbe.
TrialFactory RandomDissipativeTrials(int n_qubits);

}  // namespace dqst
