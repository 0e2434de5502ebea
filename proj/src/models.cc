#include "dqst/models.h"

#include <cmath>
#include <sstream>

#include "dqst/errors.h"

namespace dqst {
namespace {

OperatorMatrix OnSites(int n_sites, std::initializer_list<std::pair<int, char>>
                                        factors) {
  std::string label(n_sites, 'I');
  for (const auto& [site, which] : factors) label[site] = which;
  return PauliString(label);
}

OperatorMatrix EmbedSite(const OperatorMatrix& op, int site, int n_sites) {
  OperatorMatrix out = OperatorMatrix::Identity(1, 1);
  for (int k = 0; k < n_sites; ++k) {
    out = Kron(out, k == site ? op : OperatorMatrix::Identity(2, 2));
  }
  return out;
}

void RequireLength(const std::vector<double>& v, int n, const char* name) {
  if (static_cast<int>(v.size()) != n) {
    std::ostringstream msg;
    msg << "spin chain: '" << name << "' has " << v.size()
        << " entries, expected " << n;
    throw InvalidInputError(msg.str());
  }
}

OperatorMatrix Ket(int index, int dim) {
  OperatorMatrix v = OperatorMatrix::Zero(dim, 1);
  v(index, 0) = 1.0;
  return v;
}

OperatorMatrix Dyad(int row, int col, int dim) {
  return Ket(row, dim) * Ket(col, dim).adjoint();
}

OperatorMatrix NvBlock(double D, double A, const NvParams& p) {
  const OperatorMatrix I = OperatorMatrix::Identity(2, 2);
  const OperatorMatrix Sz = 0.5 * (I - PauliMatrix('Z'));
  const OperatorMatrix Sx = PauliMatrix('X');
  const OperatorMatrix Sy = PauliMatrix('Y');
  return D * Kron(Sz * Sz, I) + p.Q * Kron(I, Sz * Sz) +
         p.B * (p.g_el * Kron(Sz, I) + p.g_n * Kron(I, Sz)) +
         0.5 * A * (Kron(Sx, Sx) + Kron(Sy, Sy) + 2.0 * Kron(Sz, Sz));
}

}  // namespace

SpinChainParams SpinChainParams::Uniform(int n_sites, double coefficient,
                                         double eta) {
  if (n_sites < 2) throw InvalidInputError("spin chain needs >= 2 sites");
  SpinChainParams p;
  p.n_sites = n_sites;
  p.alpha = p.beta = p.gamma = std::vector<double>(n_sites, coefficient);
  p.delta = p.epsilon = std::vector<double>(n_sites - 1, coefficient);
  p.eta = std::vector<double>(n_sites, eta);
  return p;
}

SpinChainParams SpinChainParams::Random(int n_sites, double eta,
                                        std::mt19937_64& rng) {
  SpinChainParams p = Uniform(n_sites, 0.0, eta);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto* v : {&p.alpha, &p.beta, &p.gamma, &p.delta, &p.epsilon}) {
    for (double& c : *v) c = normal(rng);
  }
  return p;
}

OperatorMatrix SpinChainHamiltonian(const SpinChainParams& p) {
  const int n = p.n_sites;
  if (n < 2 || n > 6) throw InvalidInputError("spin chain: need 2..6 sites");
  RequireLength(p.alpha, n, "alpha");
  RequireLength(p.beta, n, "beta");
  RequireLength(p.gamma, n, "gamma");
  RequireLength(p.delta, n - 1, "delta");
  RequireLength(p.epsilon, n - 1, "epsilon");
  const int d = 1 << n;
  OperatorMatrix H = OperatorMatrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    H += p.alpha[i] * OnSites(n, {{i, 'X'}}) +
         p.beta[i] * OnSites(n, {{i, 'Y'}}) +
         p.gamma[i] * OnSites(n, {{i, 'Z'}});
  }
  for (int i = 0; i + 1 < n; ++i) {
    H += p.delta[i] * OnSites(n, {{i, 'X'}, {i + 1, 'X'}}) +
         p.epsilon[i] * OnSites(n, {{i, 'Z'}, {i + 1, 'Z'}});
  }
  return H;
}

ModelSystem SpinChain(const SpinChainParams& p) {
  ModelSystem model;
  model.name = "spin_chain";
  model.generator.hamiltonian = SpinChainHamiltonian(p);
  const int n = p.n_sites;
  RequireLength(p.eta, n, "eta");
  OperatorMatrix raise = OperatorMatrix::Zero(2, 2);
  raise(0, 1) = 1.0;
  const OperatorMatrix lower = raise.transpose();
  for (int i = 0; i < n; ++i) {
    if (p.eta[i] < 0.0) throw InvalidInputError("spin chain: negative eta");
  }
  for (int i = 0; i < n; ++i) {
    if (p.eta[i] > 0.0) {
      model.generator.noise_ops.push_back(p.eta[i] * EmbedSite(raise, i, n));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (p.eta[i] > 0.0) {
      model.generator.noise_ops.push_back(p.eta[i] * EmbedSite(lower, i, n));
    }
  }

  const auto& sites = p.measured_sites;
  if (sites.empty()) throw InvalidInputError("spin chain: no measured sites");
  for (int s : sites) {
    if (s < 0 || s >= n) throw InvalidInputError("spin chain: bad site index");
  }
  static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
  const int count = 1 << (2 * static_cast<int>(sites.size()));
  std::vector<OperatorMatrix> obs;
  std::vector<std::string> labels;
  for (int index = 0; index < count; ++index) {
    std::string label(n, 'I');
    int rest = index;
    for (int k = static_cast<int>(sites.size()) - 1; k >= 0; --k) {
      label[sites[k]] = kLetters[rest % 4];
      rest /= 4;
    }
    obs.push_back(PauliString(label));
    labels.push_back(label);
  }
  model.measurements = MeasurementSet::Create(std::move(obs), std::move(labels));
  return model;
}

ModelSystem NvCenter(const NvParams& p) {
  for (double v : {p.gamma_d, p.gamma_p}) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw InvalidInputError("nv center: rates must be finite and >= 0");
    }
  }
  const OperatorMatrix I2 = OperatorMatrix::Identity(2, 2);
  ModelSystem model;
  model.name = "nv_center";
  model.generator.hamiltonian = Kron(Dyad(0, 0, 2), NvBlock(p.D_g, p.A_g, p)) +
                                Kron(Dyad(1, 1, 2), NvBlock(p.D_e, p.A_e, p));
  // |to, s⟩⟨from, s| on (E_el, s_el), identity on the nucleus.
  auto jump = [&](int to, int from, int s) {
    return Kron({Dyad(to, from, 2), Dyad(s, s, 2), I2});
  };
  const double sd = std::sqrt(p.gamma_d);
  const double sp = std::sqrt(p.gamma_p);
  model.generator.noise_ops = {sd * jump(0, 1, 0), sd * jump(0, 1, 1),
                               sp * jump(1, 0, 0), sp * jump(1, 0, 1)};
  model.measurements = MeasurementSet::Create(
      {OperatorMatrix::Identity(8, 8), PauliString("IZI")}, {"I", "IZI"});
  model.target = PauliString("IIZ");
  return model;
}

OperatorMatrix ProductZeroState(int n_qubits) {
  if (n_qubits < 1) throw InvalidInputError("need at least one qubit");
  const int d = 1 << n_qubits;
  return Dyad(0, 0, d);
}

OperatorMatrix GhzState(int n_qubits) {
  if (n_qubits < 1) throw InvalidInputError("need at least one qubit");
  const int d = 1 << n_qubits;
  const OperatorMatrix psi = (Ket(0, d) + Ket(d - 1, d)) / std::sqrt(2.0);
  return psi * psi.adjoint();
}

OperatorMatrix GibbsState(const OperatorMatrix& H, double beta) {
  RequireHermitian(H, "Hamiltonian");
  if (!std::isfinite(beta) || beta < 0.0) {
    throw InvalidInputError("inverse temperature must be finite and >= 0");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (H + H.adjoint()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("Hamiltonian diagonalization failed");
  }
  const Eigen::VectorXd& E = eig.eigenvalues();
  // Shift by the ground energy so the weights cannot overflow.
  Eigen::VectorXd w = (-beta * (E.array() - E.minCoeff())).exp();
  w /= w.sum();
  const auto& V = eig.eigenvectors();
  const OperatorMatrix rho = V * w.cast<Complex>().asDiagonal() * V.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

OperatorMatrix NvSeparableState() {
  return (OperatorMatrix::Identity(8, 8) + PauliString("IIZ")) / 8.0;
}

Eigen::MatrixXcd PsiMatrix(const LindbladGenerator& gen,
                           const OperatorBasis& basis) {
  const int d = gen.dim();
  const int n = basis.size();
  if (basis.dim != d || n != d * d) {
    throw DimensionError("psi matrix: basis does not match the generator");
  }
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      const double expected = m == k ? 1.0 : 0.0;
      if (std::abs(HsInner(basis.elements[m], basis.elements[k]) - expected) >
          1e-10) {
        throw InvalidInputError("psi matrix needs an orthonormal basis");
      }
    }
  }
  const Superoperator L = GeneratorMatrix(gen);
  Eigen::MatrixXcd F(d * d, n);
  for (int k = 0; k < n; ++k) F.col(k) = Vec(basis.elements[k]);
  // tr[F_m 𝓛(F_n)] = vec(F_m†)†·L·vec(F_n) and F_m is Hermitian.
  return F.adjoint() * L.matrix * F;
}

Eigen::MatrixXd RMatrix(int n_qubits) {
  const OperatorBasis basis = PauliBasis(n_qubits, PauliNormalization::kRawPauli);
  const int d = basis.dim;
  const int n = basis.size() - 1;
  Eigen::MatrixXd R(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const OperatorMatrix P = basis.elements[a + 1] * basis.elements[b + 1];
      R(a, b) = (P * P).trace().real() - d;
    }
  }
  return R;
}

OperatorMatrix GenericProbe(int n_qubits, std::mt19937_64& rng) {
  const OperatorBasis basis = PauliBasis(n_qubits, PauliNormalization::kRawPauli);
  std::normal_distribution<double> normal(0.0, 1.0);
  OperatorMatrix X = OperatorMatrix::Zero(basis.dim, basis.dim);
  for (int i = 1; i < basis.size(); ++i) X += normal(rng) * basis.elements[i];
  return X;
}

ModelSystem DissipativeNQubit(const DissipativeQubitSpec& spec) {
  GKSSpec gks;
  gks.basis = PauliBasis(spec.n_qubits, PauliNormalization::kRawPauli);
  const int d = gks.basis.dim;
  if (spec.rates.size() != d * d - 1) {
    throw DimensionError("dissipative model: need d² − 1 rates");
  }
  if ((spec.rates.array() < 0.0).any() || !spec.rates.allFinite()) {
    throw InvalidInputError("dissipative model: rates must be >= 0");
  }
  gks.coefficients = spec.rates.cast<Complex>().asDiagonal();
  gks.hamiltonian = OperatorMatrix::Zero(d, d);
  ModelSystem model;
  model.name = "dissipative_nqubit";
  model.generator = GksToLindblad(gks);
  model.measurements = MeasurementSet::WithIdentity({spec.probe}, {"probe"});
  return model;
}

OperatorMatrix RandomHermitian(int d, std::mt19937_64& rng) {
  if (d < 1) throw InvalidInputError("random Hermitian: d must be >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  OperatorMatrix G(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      const double re = normal(rng);
      G(i, j) = Complex(re, normal(rng));
    }
  }
  return 0.5 * (G + G.adjoint());
}

TrialFactory RandomUnitaryTrials(int d, int n_observables) {
  if (n_observables < 1) {
    throw InvalidInputError("random trials need at least the identity");
  }
  return [d, n_observables](std::mt19937_64& rng) {
    LindbladGenerator gen;
    gen.hamiltonian = RandomHermitian(d, rng);
    std::vector<OperatorMatrix> obs;
    for (int k = 1; k < n_observables; ++k) obs.push_back(RandomHermitian(d, rng));
    return TrialSystem{GeneratorMatrix(gen), MeasurementSet::WithIdentity(obs)};
  };
}

TrialFactory RandomSpinChainTrials(int n_sites, double eta) {
  return [n_sites, eta](std::mt19937_64& rng) {
    const ModelSystem m = SpinChain(SpinChainParams::Random(n_sites, eta, rng));
    return TrialSystem{GeneratorMatrix(m.generator), m.measurements};
  };
}

TrialFactory RandomDissipativeTrials(int n_qubits) {
  return [n_qubits](std::mt19937_64& rng) {
    DissipativeQubitSpec spec;
    spec.n_qubits = n_qubits;
    const int d2 = 1 << (2 * n_qubits);
    spec.rates.resize(d2 - 1);
    std::uniform_real_distribution<double> uniform(0.1, 1.1);
    for (Eigen::Index k = 0; k < spec.rates.size(); ++k) spec.rates(k) = uniform(rng);
    spec.probe = GenericProbe(n_qubits, rng);
    const ModelSystem m = DissipativeNQubit(spec);
    return TrialSystem{GeneratorMatrix(m.generator), m.measurements};
  };
}

}  // namespace dqst
