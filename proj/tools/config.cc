#include "config.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "dqst/errors.h"

namespace dqst::cli {
namespace {

std::string Where(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string Where(const std::string& parent, std::size_t index) {
  return parent + "[" + std::to_string(index) + "]";
}

void RequireKeys(const Json& j, const std::set<std::string>& allowed,
                 const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key '" + Where(where, item.key()) + "'");
    }
  }
}

double Number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
  return v;
}

long long Integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<long long>();
}

bool Boolean(const Json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

std::string String(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> Numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(Number(j[i], Where(where, i)));
  }
  return out;
}

double NumberOr(const Json& parent, const std::string& key, double fallback,
                const std::string& where) {
  return parent.contains(key) ? Number(parent[key], Where(where, key))
                              : fallback;
}

long long IntegerOr(const Json& parent, const std::string& key,
                    long long fallback, const std::string& where) {
  return parent.contains(key) ? Integer(parent[key], Where(where, key))
                              : fallback;
}

Complex Coefficient(const Json& j, const std::string& where) {
  if (j.is_number()) return {Number(j, where), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {Number(j[0], where + "[0]"), Number(j[1], where + "[1]")};
  }
  throw ConfigError(where + ": expected a number or a [re, im] pair");
}

Eigen::MatrixXd RealGrid(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw ConfigError(where + ": expected a nested numeric array");
  }
  Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()),
                    static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != j[0].size()) {
      throw ConfigError(where + ": rows have different lengths");
    }
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Number(j[r][c], Where(Where(where, r), c));
    }
  }
  return M;
}

OperatorMatrix KetProjector(const std::string& bits, const std::string& where) {
  if (bits.empty() || bits.size() > 12) {
    throw ConfigError(where + ": ket needs 1 to 12 binary digits");
  }
  int index = 0;
  for (char b : bits) {
    if (b != '0' && b != '1') {
      throw ConfigError(where + ": ket digits must be 0 or 1");
    }
    index = 2 * index + (b - '0');
  }
  const int d = 1 << bits.size();
  OperatorMatrix P = OperatorMatrix::Zero(d, d);
  P(index, index) = 1.0;
  return P;
}

OperatorMatrix FromString(const std::string& s, const std::string& where) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw ConfigError(where + ": matrix string needs a 'kind:' prefix");
  }
  const std::string kind = s.substr(0, colon);
  const std::string arg = s.substr(colon + 1);
  if (kind == "pauli") {
    try {
      return PauliString(arg);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (kind == "ket") return KetProjector(arg, where);
  if (kind == "identity") {
    int d = 0;
    try {
      d = std::stoi(arg);
    } catch (const std::exception&) {
      throw ConfigError(where + ": identity needs an integer dimension");
    }
    if (d < 1) throw ConfigError(where + ": identity dimension must be >= 1");
    return OperatorMatrix::Identity(d, d);
  }
  throw ConfigError(where + ": unknown matrix kind '" + kind + "'");
}

void RequireHermitianEntry(const OperatorMatrix& M, const std::string& where) {
  const double dev = HermiticityDeviation(M);
  if (dev > kHermiticityTol) {
    std::ostringstream msg;
    msg << where << " is not Hermitian (max |M - M^H| = " << dev << ")";
    throw ConfigError(msg.str());
  }
}

bool IsIdentityMultiple(const OperatorMatrix& X) {
  const Complex c = X.trace() / static_cast<double>(X.rows());
  if (std::abs(c) < 1e-12) return false;
  return (X - c * OperatorMatrix::Identity(X.rows(), X.cols())).norm() <=
         1e-10 * X.norm();
}

int QubitCount(int d, const std::string& where) {
  int n = 0;
  while ((1 << n) < d) ++n;
  if ((1 << n) != d) {
    throw ConfigError(where + ": needs a qubit system (d a power of 2)");
  }
  return n;
}

ModelSystem SpinChainModel(const Json& params, const std::string& where) {
  RequireKeys(params,
              {"n_sites", "coefficient", "eta", "alpha", "beta", "gamma",
               "delta", "epsilon", "measured_sites"},
              where);
  const int n = static_cast<int>(IntegerOr(params, "n_sites", 4, where));
  if (n < 2 || n > 6) throw ConfigError(Where(where, "n_sites") + ": 2..6");
  SpinChainParams p = SpinChainParams::Uniform(
      n, NumberOr(params, "coefficient", 1.0, where), 0.0);
  if (params.contains("eta")) {
    const Json& eta = params["eta"];
    p.eta = eta.is_array() ? Numbers(eta, Where(where, "eta"))
                           : std::vector<double>(
                                 n, Number(eta, Where(where, "eta")));
  }
  const std::pair<const char*, std::vector<double>*> arrays[] = {
      {"alpha", &p.alpha}, {"beta", &p.beta}, {"gamma", &p.gamma},
      {"delta", &p.delta}, {"epsilon", &p.epsilon}};
  for (const auto& [key, target] : arrays) {
    if (params.contains(key)) *target = Numbers(params[key], Where(where, key));
  }
  if (params.contains("measured_sites")) {
    p.measured_sites.clear();
    for (std::size_t i = 0; i < params["measured_sites"].size(); ++i) {
      p.measured_sites.push_back(static_cast<int>(Integer(
          params["measured_sites"][i], Where(Where(where, "measured_sites"), i))));
    }
  }
  return SpinChain(p);
}

ModelSystem NvModel(const Json& params, const std::string& where) {
  NvParams p;
  const std::pair<const char*, double*> fields[] = {
      {"D_e", &p.D_e},     {"D_g", &p.D_g},         {"Q", &p.Q},
      {"A_e", &p.A_e},     {"A_g", &p.A_g},         {"g_el", &p.g_el},
      {"g_n", &p.g_n},     {"B", &p.B},             {"gamma_d", &p.gamma_d},
      {"gamma_p", &p.gamma_p}};
  std::set<std::string> allowed;
  for (const auto& [key, value] : fields) allowed.insert(key);
  RequireKeys(params, allowed, where);
  for (const auto& [key, value] : fields) {
    *value = NumberOr(params, key, *value, where);
  }
  return NvCenter(p);
}

ModelSystem DissipativeModel(const Json& params, const std::string& where) {
  RequireKeys(params, {"n_qubits", "rates", "probe"}, where);
  DissipativeQubitSpec spec;
  spec.n_qubits = static_cast<int>(IntegerOr(params, "n_qubits", 1, where));
  if (spec.n_qubits < 1 || spec.n_qubits > 3) {
    throw ConfigError(Where(where, "n_qubits") + ": 1..3");
  }
  if (!params.contains("rates") || !params.contains("probe")) {
    throw ConfigError(where + ": needs 'rates' and 'probe'");
  }
  const auto rates = Numbers(params["rates"], Where(where, "rates"));
  spec.rates = Eigen::Map<const Eigen::VectorXd>(
      rates.data(), static_cast<Eigen::Index>(rates.size()));
  spec.probe = ParseMatrix(params["probe"], Where(where, "probe"));
  RequireHermitianEntry(spec.probe, Where(where, "probe"));
  return DissipativeNQubit(spec);
}

ModelSystem ModelFromBlock(const Json& block) {
  RequireKeys(block, {"name", "params"}, "model");
  const std::string name = String(block.value("name", Json()), "model.name");
  const Json params = block.value("params", Json::object());
  if (name == "spin_chain") return SpinChainModel(params, "model.params");
  if (name == "nv_center") return NvModel(params, "model.params");
  if (name == "dissipative_nqubit") {
    return DissipativeModel(params, "model.params");
  }
  throw ConfigError("model.name: unknown model '" + name + "'");
}

ModelSystem SystemFromBlock(const Json& block, DynamicsMode mode,
                            std::vector<OperatorMatrix>& kraus) {
  RequireKeys(block, {"hamiltonian", "noise", "observables", "kraus"},
              "system");
  ModelSystem m;
  m.name = "custom";
  if (mode == DynamicsMode::kDiscrete) {
    if (!block.contains("kraus") || !block["kraus"].is_array() ||
        block["kraus"].empty()) {
      throw ConfigError("system.kraus: discrete dynamics need Kraus operators");
    }
    for (std::size_t i = 0; i < block["kraus"].size(); ++i) {
      kraus.push_back(
          ParseMatrix(block["kraus"][i], Where("system.kraus", i)));
    }
    const int d = static_cast<int>(kraus.front().rows());
    m.generator.hamiltonian = OperatorMatrix::Zero(d, d);
  } else {
    if (block.contains("kraus")) {
      throw ConfigError("system.kraus: only valid with dynamics.mode = discrete");
    }
    if (!block.contains("hamiltonian")) {
      throw ConfigError("system.hamiltonian: required");
    }
    m.generator.hamiltonian =
        ParseMatrix(block["hamiltonian"], "system.hamiltonian");
    RequireHermitianEntry(m.generator.hamiltonian, "system.hamiltonian");
    if (block.contains("noise")) {
      if (!block["noise"].is_array()) {
        throw ConfigError("system.noise: expected an array");
      }
      for (std::size_t i = 0; i < block["noise"].size(); ++i) {
        m.generator.noise_ops.push_back(
            ParseMatrix(block["noise"][i], Where("system.noise", i)));
      }
    }
  }
  if (!block.contains("observables") || !block["observables"].is_array() ||
      block["observables"].empty()) {
    throw ConfigError("system.observables: expected a non-empty array");
  }
  std::vector<OperatorMatrix> obs;
  std::vector<std::string> labels;
  bool has_identity = false;
  for (std::size_t i = 0; i < block["observables"].size(); ++i) {
    const Json& entry = block["observables"][i];
    std::string where = Where("system.observables", i);
    std::string label;
    OperatorMatrix X;
    if (entry.is_object() && entry.contains("matrix")) {
      RequireKeys(entry, {"label", "matrix"}, where);
      label = entry.contains("label") ? String(entry["label"], where + ".label")
                                      : "X" + std::to_string(i);
      X = ParseMatrix(entry["matrix"], where + ".matrix");
    } else {
      label = entry.is_string() ? entry.get<std::string>()
                                : "X" + std::to_string(i);
      X = ParseMatrix(entry, where);
    }
    RequireHermitianEntry(X, where + " (\"" + label + "\")");
    has_identity = has_identity || IsIdentityMultiple(X);
    obs.push_back(std::move(X));
    labels.push_back(std::move(label));
  }
  m.measurements = has_identity ? MeasurementSet::Create(obs, labels)
                                : MeasurementSet::WithIdentity(obs, labels);
  return m;
}

NamedState BuiltinState(const std::string& kind, const std::string& name,
                        double beta, const Experiment& ex,
                        const std::string& where) {
  const int d = ex.system.generator.dim();
  NamedState s{name, {}};
  if (kind == "maximally_mixed") {
    s.rho = OperatorMatrix::Identity(d, d) / static_cast<double>(d);
  } else if (kind == "product_zero") {
    s.rho = ProductZeroState(QubitCount(d, where));
  } else if (kind == "ghz") {
    s.rho = GhzState(QubitCount(d, where));
  } else if (kind == "gibbs") {
    s.rho = GibbsState(ex.system.generator.hamiltonian, beta);
  } else if (kind == "nv_separable") {
    if (d != 8) throw ConfigError(where + ": nv_separable needs d = 8");
    s.rho = NvSeparableState();
  } else {
    throw ConfigError(where + ": unknown state '" + kind + "'");
  }
  return s;
}

void ValidateState(const NamedState& s, int d, const std::string& where) {
  if (s.rho.rows() != d || s.rho.cols() != d) {
    throw ConfigError(where + ": state dimension does not match the system");
  }
  RequireHermitianEntry(s.rho, where);
  if (std::abs(s.rho.trace() - Complex(1.0, 0.0)) > 1e-8) {
    throw ConfigError(where + ": state trace must be 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s.rho);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw ConfigError(where + ": state is not positive semidefinite");
  }
}

std::vector<NamedState> ParseStates(const Json& j, const Experiment& ex) {
  if (!j.is_array()) throw ConfigError("states: expected an array");
  std::vector<NamedState> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = Where("states", i);
    NamedState s;
    if (j[i].is_string()) {
      s = BuiltinState(j[i].get<std::string>(), j[i].get<std::string>(), 1.0,
                       ex, where);
    } else {
      RequireKeys(j[i], {"name", "kind", "beta", "matrix"}, where);
      const std::string name = String(j[i].value("name", Json()), where + ".name");
      if (j[i].contains("matrix") == j[i].contains("kind")) {
        throw ConfigError(where + ": give exactly one of 'kind' and 'matrix'");
      }
      if (j[i].contains("matrix")) {
        s = {name, ParseMatrix(j[i]["matrix"], where + ".matrix")};
      } else {
        s = BuiltinState(String(j[i]["kind"], where + ".kind"), name,
                         NumberOr(j[i], "beta", 1.0, where), ex, where);
      }
    }
    if (!names.insert(s.name).second) {
      throw ConfigError(where + ": duplicate state name '" + s.name + "'");
    }
    for (char c : s.name) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
        throw ConfigError(where + ": state names may use [A-Za-z0-9_-] only");
      }
    }
    ValidateState(s, ex.system.generator.dim(), where);
    out.push_back(std::move(s));
  }
  return out;
}

TargetSpec ParseTarget(const Json& j, const Experiment& ex) {
  RequireKeys(j, {"observable", "times", "observables", "minimal_support", "tol"},
              "target");
  TargetSpec t;
  if (j.contains("observable")) {
    t.Z = ParseMatrix(j["observable"], "target.observable");
  } else if (ex.system.target) {
    t.Z = *ex.system.target;
  } else {
    throw ConfigError("target.observable: required for this system");
  }
  RequireHermitianEntry(t.Z, "target.observable");
  if (t.Z.rows() != ex.system.generator.dim()) {
    throw ConfigError("target.observable: dimension does not match the system");
  }
  t.times = j.contains("times") ? Numbers(j["times"], "target.times")
                                : std::vector<double>{0.0};
  if (t.times.empty()) throw ConfigError("target.times: must not be empty");
  for (double time : t.times) {
    if (time < 0.0) throw ConfigError("target.times: must be >= 0");
  }
  if (j.contains("observables")) {
    const auto& labels = ex.system.measurements.labels();
    for (std::size_t i = 0; i < j["observables"].size(); ++i) {
      const std::string where = Where("target.observables", i);
      const std::string label = String(j["observables"][i], where);
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
        throw ConfigError(where + ": no observable labelled '" + label + "'");
      }
      t.observables.push_back(label);
    }
  }
  if (j.contains("minimal_support")) {
    t.minimal_support = Boolean(j["minimal_support"], "target.minimal_support");
  }
  t.tol = NumberOr(j, "tol", t.tol, "target");
  if (!(t.tol > 0.0)) throw ConfigError("target.tol: must be > 0");
  return t;
}

GenericitySpec ParseGenericity(const Json& j) {
  RequireKeys(j, {"family", "trials", "n_sites", "eta", "dim", "n_observables",
                  "n_qubits"},
              "genericity");
  GenericitySpec g;
  g.family = String(j.value("family", Json("spin_chain")), "genericity.family");
  g.trials = static_cast<int>(IntegerOr(j, "trials", g.trials, "genericity"));
  g.n_sites = static_cast<int>(IntegerOr(j, "n_sites", g.n_sites, "genericity"));
  g.eta = NumberOr(j, "eta", g.eta, "genericity");
  g.dim = static_cast<int>(IntegerOr(j, "dim", g.dim, "genericity"));
  g.n_observables = static_cast<int>(
      IntegerOr(j, "n_observables", g.n_observables, "genericity"));
  g.n_qubits = static_cast<int>(IntegerOr(j, "n_qubits", g.n_qubits, "genericity"));
  if (g.trials < 1) throw ConfigError("genericity.trials: must be >= 1");
  if (g.family != "spin_chain" && g.family != "random_unitary" &&
      g.family != "dissipative_nqubit") {
    throw ConfigError("genericity.family: unknown family '" + g.family + "'");
  }
  return g;
}

ScalingSetup ParseScaling(const Json& j, SamplingMode mode) {
  RequireKeys(j, {"shots", "seeds"}, "error_scaling");
  ScalingSetup s;
  s.mode = mode;
  s.shots = {100, 1000, 10000, 100000, 1000000};
  if (j.contains("shots")) {
    s.shots.clear();
    for (std::size_t i = 0; i < j["shots"].size(); ++i) {
      const long long n = Integer(j["shots"][i], Where("error_scaling.shots", i));
      if (n < 1) throw ConfigError("error_scaling.shots: must be >= 1");
      s.shots.push_back(n);
    }
    if (s.shots.size() < 2) {
      throw ConfigError("error_scaling.shots: need at least two values");
    }
  }
  s.n_seeds = static_cast<int>(IntegerOr(j, "seeds", 20, "error_scaling"));
  if (s.n_seeds < 1) throw ConfigError("error_scaling.seeds: must be >= 1");
  return s;
}

}  // namespace

Json ReadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
}

OperatorMatrix ParseMatrix(const Json& spec, const std::string& where) {
  if (spec.is_string()) return FromString(spec.get<std::string>(), where);
  if (!spec.is_object()) {
    throw ConfigError(where + ": expected a matrix string or object");
  }
  if (spec.contains("terms")) {
    RequireKeys(spec, {"terms"}, where);
    const Json& terms = spec["terms"];
    if (!terms.is_array() || terms.empty()) {
      throw ConfigError(where + ".terms: expected a non-empty array");
    }
    OperatorMatrix sum;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string w = Where(where + ".terms", i);
      RequireKeys(terms[i], {"coef", "op"}, w);
      if (!terms[i].contains("op")) throw ConfigError(w + ".op: required");
      const Complex c = terms[i].contains("coef")
                            ? Coefficient(terms[i]["coef"], w + ".coef")
                            : Complex(1.0, 0.0);
      const OperatorMatrix op = ParseMatrix(terms[i]["op"], w + ".op");
      if (i == 0) {
        sum = c * op;
      } else if (op.rows() != sum.rows() || op.cols() != sum.cols()) {
        throw ConfigError(w + ": term dimensions differ");
      } else {
        sum += c * op;
      }
    }
    return sum;
  }
  RequireKeys(spec, {"re", "im"}, where);
  if (!spec.contains("re")) throw ConfigError(where + ".re: required");
  const Eigen::MatrixXd re = RealGrid(spec["re"], where + ".re");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (spec.contains("im")) {
    im = RealGrid(spec["im"], where + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) {
      throw ConfigError(where + ": re and im shapes differ");
    }
  }
  if (re.rows() != re.cols()) throw ConfigError(where + ": must be square");
  OperatorMatrix M(re.rows(), re.cols());
  M.real() = re;
  M.imag() = im;
  return M;
}

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw NumericalError("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

Experiment BuildExperiment(Json config, const Overrides& overrides,
                           bool require_system) {
  if (config.is_null()) config = Json::object();
  RequireKeys(config,
              {"model", "system", "dynamics", "horizon", "shots", "seed",
               "sampling", "states", "target", "selection", "reconstruction",
               "genericity", "error_scaling", "output_dir", "emit_bases",
               "rank_tol"},
              "");
  if (overrides.seed) config["seed"] = *overrides.seed;
  if (overrides.tol) config["rank_tol"] = *overrides.tol;
  if (overrides.psd_project) config["reconstruction"]["psd_project"] = true;

  Experiment ex;
  if (overrides.out) {
    ex.output_dir = *overrides.out;
  } else if (config.contains("output_dir")) {
    ex.output_dir = String(config["output_dir"], "output_dir");
  }
  Json hashed = config;
  hashed.erase("output_dir");
  ex.config_hash = Sha256Hex(hashed.dump());
  ex.config = std::move(config);
  const Json& c = ex.config;

  if (c.contains("seed")) {
    if (!c["seed"].is_number_unsigned()) {
      throw ConfigError("seed: expected a non-negative integer");
    }
    ex.seed = c["seed"].get<std::uint64_t>();
  }
  if (c.contains("rank_tol")) {
    const double tol = Number(c["rank_tol"], "rank_tol");
    if (!(tol > 0.0)) throw ConfigError("rank_tol: must be > 0");
    ex.selection.rank_policy.absolute_threshold = tol;
    ex.reconstruction.rank_policy.absolute_threshold = tol;
  }
  if (c.contains("reconstruction")) {
    RequireKeys(c["reconstruction"], {"psd_project"}, "reconstruction");
    if (c["reconstruction"].contains("psd_project")) {
      ex.reconstruction.psd_project = Boolean(
          c["reconstruction"]["psd_project"], "reconstruction.psd_project");
    }
  }
  if (c.contains("sampling")) {
    const std::string s = String(c["sampling"], "sampling");
    if (s == "clt") {
      ex.sampling = SamplingMode::kClt;
    } else if (s == "exact") {
      ex.sampling = SamplingMode::kExact;
    } else {
      throw ConfigError("sampling: expected 'clt' or 'exact'");
    }
  }
  if (c.contains("horizon")) {
    ex.horizon = Number(c["horizon"], "horizon");
    if (!(*ex.horizon > 0.0)) throw ConfigError("horizon: must be > 0");
  }
  if (c.contains("shots")) {
    ex.shots = Integer(c["shots"], "shots");
    if (*ex.shots < 1) throw ConfigError("shots: must be >= 1");
  }
  if (c.contains("emit_bases")) ex.emit_bases = Boolean(c["emit_bases"], "emit_bases");
  if (c.contains("selection")) {
    const Json& s = c["selection"];
    RequireKeys(s, {"n_grid", "time_tol", "tie_tol", "first_pick_seed"},
                "selection");
    ex.selection.n_grid =
        static_cast<int>(IntegerOr(s, "n_grid", ex.selection.n_grid, "selection"));
    ex.selection.time_tol =
        NumberOr(s, "time_tol", ex.selection.time_tol, "selection");
    ex.selection.tie_tol = NumberOr(s, "tie_tol", ex.selection.tie_tol, "selection");
    if (s.contains("first_pick_seed")) {
      if (!s["first_pick_seed"].is_number_unsigned()) {
        throw ConfigError("selection.first_pick_seed: expected an integer");
      }
      ex.selection.first_pick_seed = s["first_pick_seed"].get<std::uint64_t>();
    }
    if (ex.selection.n_grid < 2) throw ConfigError("selection.n_grid: >= 2");
  }
  if (c.contains("dynamics")) {
    const Json& d = c["dynamics"];
    RequireKeys(d, {"mode", "dt"}, "dynamics");
    const std::string mode = String(d.value("mode", Json("continuous")),
                                    "dynamics.mode");
    if (mode == "continuous") {
      ex.mode = DynamicsMode::kContinuous;
    } else if (mode == "discrete") {
      ex.mode = DynamicsMode::kDiscrete;
    } else if (mode == "discretized") {
      ex.mode = DynamicsMode::kDiscretized;
      if (!d.contains("dt")) throw ConfigError("dynamics.dt: required");
      ex.dt = Number(d["dt"], "dynamics.dt");
      if (!(ex.dt > 0.0)) throw ConfigError("dynamics.dt: must be > 0");
    } else {
      throw ConfigError("dynamics.mode: expected continuous, discrete or discretized");
    }
  }

  const bool has_model = c.contains("model");
  const bool has_matrices = c.contains("system");
  if (has_model && has_matrices) {
    throw ConfigError("give exactly one of 'model' and 'system'");
  }
  if (require_system && !has_model && !has_matrices) {
    throw ConfigError("config needs a 'model' or a 'system' block");
  }
  try {
    if (has_model) {
      if (ex.mode == DynamicsMode::kDiscrete) {
        throw ConfigError("dynamics.mode: discrete needs a 'system' block with Kraus operators");
      }
      ex.system = ModelFromBlock(c["model"]);
      ex.has_system = true;
    } else if (has_matrices) {
      ex.system = SystemFromBlock(c["system"], ex.mode, ex.kraus);
      ex.has_system = true;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(has_model ? "model" : "system") + ": " +
                      e.what());
  }

  if (c.contains("states")) {
    if (!ex.has_system) throw ConfigError("states: need a model or system");
    ex.states = ParseStates(c["states"], ex);
  }
  if (c.contains("target")) {
    if (!ex.has_system) throw ConfigError("target: needs a model or system");
    ex.target = ParseTarget(c["target"], ex);
  }
  if (c.contains("genericity")) ex.genericity = ParseGenericity(c["genericity"]);
  if (c.contains("error_scaling")) {
    ex.error_scaling = ParseScaling(c["error_scaling"], ex.sampling);
  }
  return ex;
}

Superoperator AnalyzedDynamics(const Experiment& ex) {
  switch (ex.mode) {
    case DynamicsMode::kDiscrete:
      return KrausSuperoperator(KrausMap{ex.kraus});
    case DynamicsMode::kDiscretized:
      return Propagate(GeneratorMatrix(ex.system.generator), ex.dt);
    case DynamicsMode::kContinuous:
      break;
  }
  return GeneratorMatrix(ex.system.generator);
}

std::uint64_t RequireSeed(const Experiment& ex, const std::string& step) {
  if (!ex.seed) {
    throw ConfigError(step + " is stochastic: give 'seed' in the config or --seed");
  }
  return *ex.seed;
}

void RequireContinuous(const Experiment& ex, const std::string& step) {
  if (ex.mode != DynamicsMode::kContinuous) {
    throw ConfigError(step + " needs continuous-time dynamics");
  }
}

}  // namespace dqst::cli
