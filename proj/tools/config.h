#pragma once

// Experiment configuration: JSON document → validated library inputs.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dqst/experiments.h"
#include "dqst/measurement.h"
#include "dqst/models.h"
#include "dqst/reconstruct.h"
#include "dqst/selection.h"

namespace dqst::cli {

using Json = nlohmann::json;

/// Malformed or inconsistent configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DynamicsMode { kContinuous, kDiscrete, kDiscretized };

struct NamedState {
  std::string name;
  OperatorMatrix rho;
};

struct TargetSpec {
  OperatorMatrix Z;
  std::vector<double> times;
  // Labels of 𝒳 used as candidates; empty means all of 𝒳.
  std::vector<std::string> observables;
  bool minimal_support = false;
  double tol = 1e-3;
};

struct GenericitySpec {
  std::string family;
  int trials = 100;
  int n_sites = 4;
  double eta = 0.0;
  int dim = 2;
  int n_observables = 2;
  int n_qubits = 1;
};

/// Command-line values that take precedence over the document.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol;
  bool psd_project = false;
};

struct Experiment {
  // Effective configuration after overrides; hashed for provenance.
  Json config;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";

  bool has_system = false;
  ModelSystem system;
  DynamicsMode mode = DynamicsMode::kContinuous;
  double dt = 0.0;
  std::vector<OperatorMatrix> kraus;

  std::optional<double> horizon;
  std::optional<long long> shots;
  SamplingMode sampling = SamplingMode::kClt;
  std::vector<NamedState> states;
  std::optional<TargetSpec> target;
  SelectionOptions selection;
  ReconstructionOptions reconstruction;
  std::optional<GenericitySpec> genericity;
  std::optional<ScalingSetup> error_scaling;
  bool emit_bases = false;
};

Json ReadConfigFile(const std::string& path);

/// Matrix from "pauli:XZ", "ket:01", "identity:4", {"re":…, "im":…} or
/// {"terms": [{"coef": c, "op": …}, …]}. `where` names the entry in errors.
OperatorMatrix ParseMatrix(const Json& spec, const std::string& where);

/// Validates the document. With require_system the model or system block
/// must be present; otherwise it is optional.
Experiment BuildExperiment(Json config, const Overrides& overrides,
                           bool require_system);

std::string Sha256Hex(const std::string& data);

/// The map whose observability is analyzed: the generator, its sampled
/// propagator, or the Kraus superoperator.
Superoperator AnalyzedDynamics(const Experiment& ex);

/// Throws ConfigError unless a seed was given.
std::uint64_t RequireSeed(const Experiment& ex, const std::string& step);

/// Throws ConfigError unless the dynamics are continuous.
void RequireContinuous(const Experiment& ex, const std::string& step);

}  // namespace dqst::cli
