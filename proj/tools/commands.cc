#include "commands.h"

#include <algorithm>
#include <map>

#include "dqst/errors.h"
#include "dqst/observability.h"
#include "dqst/random.h"
#include "output.h"

namespace dqst::cli {
namespace {

// Independent seed streams derived from the master seed.
constexpr std::uint64_t kRecordStream = 1;
constexpr std::uint64_t kScalingStream = 2;
constexpr std::uint64_t kGenericityStream = 3;

// Horizon used by the spin-chain reproduction when none is configured.
constexpr double kSpinChainReproHorizon = 12.0;

OutputDir Output(const Experiment& ex) {
  return OutputDir(ex.output_dir, ex.config_hash, ex.seed);
}

std::uint64_t Stream(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index) {
  return DeriveSeed(DeriveSeed(seed, stream), index);
}

Json Cx(Complex z) { return Json::array({z.real(), z.imag()}); }

const char* ModeName(DynamicsMode mode) {
  switch (mode) {
    case DynamicsMode::kDiscrete:
      return "discrete";
    case DynamicsMode::kDiscretized:
      return "discretized";
    case DynamicsMode::kContinuous:
      break;
  }
  return "continuous";
}

Json ReportJson(const ObservabilityReport& r) {
  return {{"rank", r.rank},
          {"d2", r.d2},
          {"observable", r.observable},
          {"k_stop", r.k_stop},
          {"threshold", r.audit.threshold},
          {"sv_kept", r.audit.smallest_kept},
          {"sv_dropped", r.audit.largest_dropped},
          {"n_nonobs", r.n_nonobs()},
          {"modal_deflated", r.modal_deflated},
          {"hermitian_non_obs_basis", r.hermitian_non_obs_basis}};
}

std::vector<std::vector<std::string>> BasisRows(const Eigen::MatrixXcd& B) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index c = 0; c < B.cols(); ++c) {
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
      rows.push_back({std::to_string(c), std::to_string(r),
                      Format(B(r, c).real()), Format(B(r, c).imag())});
    }
  }
  return rows;
}

Json SummaryJson(const GenericitySummary& s) {
  Json histogram = Json::object();
  for (const auto& [rank, count] : s.rank_histogram) {
    histogram[std::to_string(rank)] = count;
  }
  return {{"n_trials", s.n_trials},
          {"n_observable", s.n_observable},
          {"n_failed", s.n_failed},
          {"rank_histogram", histogram},
          {"failures", s.failures}};
}

Json CurveJson(const ScalingCurve& c) {
  Json points = Json::array();
  for (const auto& p : c.points) {
    points.push_back({{"shots", p.shots},
                      {"mean_error", p.mean_error},
                      {"std_error", p.std_error}});
  }
  return {{"name", c.name},
          {"slope", c.slope},
          {"intercept", c.intercept},
          {"points", points}};
}

std::vector<std::vector<std::string>> CurveRows(
    const std::vector<ScalingCurve>& curves) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      rows.push_back({c.name, std::to_string(p.shots), Format(p.mean_error),
                      Format(p.std_error)});
    }
  }
  return rows;
}

double ResolveHorizon(const Experiment& ex, const Superoperator& gen) {
  if (ex.horizon) return *ex.horizon;
  try {
    return DefaultHorizon(gen);
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("horizon: ") + e.what());
  }
}

std::vector<std::vector<std::string>> PlanRowsCsv(const MeasurementPlan& plan,
                                                  const MeasurementSet& X) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    rows.push_back({std::to_string(i), X.label(e.observable), Format(e.time),
                    Format(e.objective), std::to_string(e.cumulative_rank)});
  }
  return rows;
}

Json PlanJson(const MeasurementPlan& plan, const MeasurementSet& X) {
  double t_max = 0.0;
  std::map<std::string, int> counts;
  for (const auto& e : plan.entries) {
    t_max = std::max(t_max, e.time);
    ++counts[X.label(e.observable)];
  }
  return {{"horizon", plan.horizon},
          {"final_rank", plan.final_rank},
          {"target_rank", plan.target_rank},
          {"complete", plan.complete()},
          {"full_rank", plan.full_rank()},
          {"n_entries", plan.entries.size()},
          {"t_max", t_max},
          {"label_counts", counts}};
}

const std::vector<std::string> kPlanColumns = {"index", "label", "time",
                                               "objective", "cumulative_rank"};
const std::vector<std::string> kScalingColumns = {"state", "shots",
                                                  "mean_eps2", "std_eps2"};

struct Planned {
  Superoperator generator;
  MeasurementPlan plan;
};

Planned PlanFor(const Experiment& ex, const std::string& step) {
  RequireContinuous(ex, step);
  Planned p;
  p.generator = GeneratorMatrix(ex.system.generator);
  p.plan = GreedyPlan(p.generator, ex.system.measurements,
                      ResolveHorizon(ex, p.generator), ex.selection);
  return p;
}

long long RequireShots(const Experiment& ex, const std::string& step) {
  if (!ex.shots) throw ConfigError(step + " needs 'shots'");
  return *ex.shots;
}

void RequireStates(const Experiment& ex, const std::string& step) {
  if (ex.states.empty()) throw ConfigError(step + " needs 'states'");
}

// Records for one state; row j uses DeriveSeed(record_seed, j).
std::vector<ExpectationEstimate> Records(
    const std::vector<OutcomeDistribution>& dists, long long shots,
    std::uint64_t record_seed, SamplingMode mode) {
  std::vector<ExpectationEstimate> out;
  for (std::size_t j = 0; j < dists.size(); ++j) {
    out.push_back(SampleFromDistribution(dists[j].outcomes,
                                         dists[j].probabilities, shots,
                                         DeriveSeed(record_seed, j), mode));
  }
  return out;
}

Eigen::VectorXd Values(const std::vector<ExpectationEstimate>& records) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
  for (std::size_t j = 0; j < records.size(); ++j) {
    y(static_cast<Eigen::Index>(j)) = records[j].value;
  }
  return y;
}

std::vector<std::vector<std::string>> RecordRows(
    const std::vector<RowSpec>& rows, const MeasurementSet& X,
    const std::vector<ExpectationEstimate>& records, std::uint64_t record_seed) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& r = records[j];
    out.push_back({X.label(rows[j].observable), Format(rows[j].time),
                   std::to_string(r.shots), Format(r.value),
                   Format(r.exact_mean), Format(r.variance),
                   std::to_string(DeriveSeed(record_seed, j))});
  }
  return out;
}

const std::vector<std::string> kRecordColumns = {
    "obs_label", "time", "shots", "estimate", "exact_mean", "variance", "seed"};

std::vector<std::vector<std::string>> RhoRows(const OperatorMatrix& rho) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      rows.push_back({std::to_string(r), std::to_string(c),
                      Format(rho(r, c).real()), Format(rho(r, c).imag())});
    }
  }
  return rows;
}

struct TargetCandidates {
  std::vector<RowSpec> rows;
  std::vector<OperatorVector> evolved;
};

// Every requested observable at every requested time. Φ_t(I) = I, so the
// identity is offered once.
TargetCandidates Candidates(const Evolver& evolver, const MeasurementSet& X,
                            const TargetSpec& spec) {
  TargetCandidates c;
  bool identity_added = false;
  for (double t : spec.times) {
    for (int i = 0; i < X.size(); ++i) {
      if (!spec.observables.empty() &&
          std::find(spec.observables.begin(), spec.observables.end(),
                    X.label(i)) == spec.observables.end()) {
        continue;
      }
      if (i == X.identity_index()) {
        if (identity_added) continue;
        identity_added = true;
      }
      c.rows.push_back({i, t});
      c.evolved.push_back(evolver.Apply(t, Vec(X.observable(i))));
    }
  }
  return c;
}

struct TargetFit {
  TargetCheck check;
  TargetCandidates candidates;
  TargetCoefficients coefficients;
  std::vector<RowSpec> support;
  Eigen::VectorXd alpha;
};

TargetFit FitTarget(const ModelSystem& system, const Superoperator& generator,
                    const Evolver& evolver, const TargetSpec& spec,
                    const RankPolicy& policy) {
  TargetFit fit;
  const ObservabilityReport report =
      KalmanReport(generator, system.measurements, policy);
  fit.check = TargetReconstructable(report, spec.Z, policy);
  if (!fit.check.reconstructable) {
    throw InfeasibleError(
        "target_not_in_observable_subspace", report.rank, report.d2,
        "target observable has a component outside the observable subspace "
        "(relative residual " +
            Format(fit.check.relative_residual) + ")");
  }
  fit.candidates = Candidates(evolver, system.measurements, spec);
  if (fit.candidates.rows.empty()) {
    throw ConfigError("target.observables: no candidates selected");
  }
  fit.coefficients =
      spec.minimal_support
          ? MinimalSupportCoefficients(fit.candidates.evolved, spec.Z, spec.tol)
          : SolveTargetCoefficients(fit.candidates.evolved, spec.Z, spec.tol);
  for (int j : fit.coefficients.chosen) {
    fit.support.push_back(fit.candidates.rows[j]);
  }
  fit.alpha = fit.coefficients.alpha;
  return fit;
}

Json AlphaJson(const TargetFit& fit, const MeasurementSet& X) {
  Json out = Json::array();
  for (std::size_t j = 0; j < fit.support.size(); ++j) {
    out.push_back({{"label", X.label(fit.support[j].observable)},
                   {"time", fit.support[j].time},
                   {"alpha", fit.alpha(static_cast<Eigen::Index>(j))}});
  }
  return out;
}

}  // namespace

std::vector<std::string> RunAnalyze(const Experiment& ex) {
  const OutputDir out = Output(ex);
  const MeasurementSet& X = ex.system.measurements;
  const RankPolicy& policy = ex.selection.rank_policy;
  const Superoperator A = AnalyzedDynamics(ex);
  const ObservabilityReport report = KalmanReport(A, X, policy);
  const PbhResult pbh = PbhTest(A, X, policy);

  Json j = ReportJson(report);
  j["command"] = "analyze";
  j["model"] = ex.system.name;
  j["dynamics_mode"] = ModeName(ex.mode);
  j["dim"] = X.dim();
  j["n_observables"] = X.size();
  j["labels"] = X.labels();
  j["pbh"] = {{"observable", pbh.observable},
              {"min_rank", pbh.min_rank},
              {"witness", pbh.witness ? Cx(*pbh.witness) : Json(nullptr)}};
  j["counting_bounds"] = {
      {"unitary_possible", EvaluateCountingBounds(X.dim(), X.size()).unitary_possible}};
  if (ex.mode != DynamicsMode::kDiscrete) {
    const Superoperator gen = GeneratorMatrix(ex.system.generator);
    const auto lambda2 = SlowestDecayEigenvalue(gen);
    j["lambda2"] = lambda2 ? Cx(*lambda2) : Json(nullptr);
    if (ex.mode == DynamicsMode::kDiscretized) {
      const AliasingResult alias = AliasingOk(gen, ex.dt);
      Json offending = Json::array();
      for (const auto& [a, b] : alias.offending) {
        offending.push_back({Cx(a), Cx(b)});
      }
      j["aliasing"] = {{"dt", ex.dt}, {"ok", alias.ok}, {"offending", offending}};
    }
  }
  if (ex.target) {
    const TargetCheck check = TargetReconstructable(report, ex.target->Z, policy);
    j["target"] = {{"reconstructable", check.reconstructable},
                   {"relative_residual", check.relative_residual}};
  }
  std::vector<std::string> files = {out.WriteJson("analyze.json", j)};
  if (ex.emit_bases) {
    const std::vector<std::string> cols = {"vector", "entry", "re", "im"};
    files.push_back(out.WriteCsv("obs_basis.csv", cols, BasisRows(report.obs_basis)));
    files.push_back(
        out.WriteCsv("non_obs_basis.csv", cols, BasisRows(report.non_obs_basis)));
  }
  return files;
}

std::vector<std::string> RunSelect(const Experiment& ex) {
  const OutputDir out = Output(ex);
  const Planned p = PlanFor(ex, "select");
  const MeasurementSet& X = ex.system.measurements;
  Json j = PlanJson(p.plan, X);
  j["command"] = "select";
  j["model"] = ex.system.name;
  return {out.WriteCsv("plan.csv", kPlanColumns, PlanRowsCsv(p.plan, X)),
          out.WriteJson("plan.json", j)};
}

std::vector<std::string> RunSimulate(const Experiment& ex) {
  const std::uint64_t seed = RequireSeed(ex, "simulate");
  const long long shots = RequireShots(ex, "simulate");
  RequireStates(ex, "simulate");
  const OutputDir out = Output(ex);
  const Planned p = PlanFor(ex, "simulate");
  const Evolver evolver(p.generator);
  const MeasurementSet& X = ex.system.measurements;
  const std::vector<RowSpec> rows = PlanRows(p.plan);
  std::vector<std::string> files = {
      out.WriteCsv("plan.csv", kPlanColumns, PlanRowsCsv(p.plan, X))};
  for (std::size_t s = 0; s < ex.states.size(); ++s) {
    const auto dists = RowDistributions(evolver, X, rows, ex.states[s].rho);
    const std::uint64_t record_seed = Stream(seed, kRecordStream, s);
    const auto records = Records(dists, shots, record_seed, ex.sampling);
    files.push_back(out.WriteCsv("records_" + ex.states[s].name + ".csv",
                                 kRecordColumns,
                                 RecordRows(rows, X, records, record_seed)));
  }
  return files;
}

std::vector<std::string> RunReconstruct(const Experiment& ex) {
  const std::uint64_t seed = RequireSeed(ex, "reconstruct");
  const long long shots = RequireShots(ex, "reconstruct");
  RequireStates(ex, "reconstruct");
  const OutputDir out = Output(ex);
  const Planned p = PlanFor(ex, "reconstruct");
  const Evolver evolver(p.generator);
  const MeasurementSet& X = ex.system.measurements;
  const std::vector<RowSpec> rows = PlanRows(p.plan);
  const DesignMatrix O = BuildDesignMatrix(p.plan);
  const StateEstimator estimator(O, ex.reconstruction);

  std::vector<std::string> files;
  Json states = Json::array();
  std::vector<ScalingCurve> curves;
  for (std::size_t s = 0; s < ex.states.size(); ++s) {
    const NamedState& state = ex.states[s];
    const auto dists = RowDistributions(evolver, X, rows, state.rho);
    const std::uint64_t record_seed = Stream(seed, kRecordStream, s);
    const auto records = Records(dists, shots, record_seed, ex.sampling);
    const ReconstructionResult result = estimator.Estimate(Values(records));
    Eigen::VectorXd variances(static_cast<Eigen::Index>(records.size()));
    for (std::size_t j = 0; j < records.size(); ++j) {
      variances(static_cast<Eigen::Index>(j)) = records[j].variance;
    }
    states.push_back(
        {{"name", state.name},
         {"eps2", (result.rho - state.rho).squaredNorm()},
         {"mse_exact", MseExact(O, variances, shots, ex.reconstruction.rank_policy)},
         {"residual_norm", result.residual_norm},
         {"trace", Cx(result.rho.trace())}});
    files.push_back(out.WriteCsv("rho_" + state.name + ".csv",
                                 {"row", "col", "re", "im"}, RhoRows(result.rho)));
    if (ex.error_scaling) {
      ScalingSetup setup = *ex.error_scaling;
      setup.seed = Stream(seed, kScalingStream, s);
      curves.push_back(StateErrorScaling(state.name, evolver, X, rows,
                                         estimator, state.rho, setup));
    }
  }
  Json j = {{"command", "reconstruct"},
            {"model", ex.system.name},
            {"shots", shots},
            {"rank", estimator.rank()},
            {"condition_number", estimator.condition_number()},
            {"n_rows", rows.size()},
            {"psd_project", ex.reconstruction.psd_project},
            {"states", states}};
  if (!curves.empty()) {
    Json c = Json::array();
    for (const auto& curve : curves) c.push_back(CurveJson(curve));
    j["error_scaling"] = c;
    files.push_back(
        out.WriteCsv("error_scaling.csv", kScalingColumns, CurveRows(curves)));
  }
  files.insert(files.begin(), out.WriteJson("reconstruct.json", j));
  return files;
}

std::vector<std::string> RunTarget(const Experiment& ex) {
  if (!ex.target) throw ConfigError("target needs a 'target' block");
  RequireContinuous(ex, "target");
  const OutputDir out = Output(ex);
  const Superoperator gen = GeneratorMatrix(ex.system.generator);
  const Evolver evolver(gen);
  const MeasurementSet& X = ex.system.measurements;
  const TargetFit fit =
      FitTarget(ex.system, gen, evolver, *ex.target, ex.selection.rank_policy);

  Json j = {{"command", "target"},
            {"model", ex.system.name},
            {"reconstructable", fit.check.reconstructable},
            {"relative_residual", fit.check.relative_residual},
            {"fit_residual", fit.coefficients.residual},
            {"alpha", AlphaJson(fit, X)}};
  std::vector<std::string> files;
  Json states = Json::array();
  std::vector<ScalingCurve> curves;
  for (std::size_t s = 0; s < ex.states.size(); ++s) {
    const NamedState& state = ex.states[s];
    const double z = (ex.target->Z * state.rho).trace().real();
    const auto dists = RowDistributions(evolver, X, fit.support, state.rho);
    Json entry = {{"name", state.name}, {"z_exact", z}};
    if (ex.shots) {
      const std::uint64_t record_seed =
          Stream(RequireSeed(ex, "target estimation"), kRecordStream, s);
      const auto records = Records(dists, *ex.shots, record_seed, ex.sampling);
      const double z_hat = TargetEstimate(fit.alpha, Values(records));
      entry["z_hat"] = z_hat;
      entry["eps2"] = (z - z_hat) * (z - z_hat);
      entry["shots"] = *ex.shots;
    } else {
      Eigen::VectorXd means(static_cast<Eigen::Index>(dists.size()));
      for (std::size_t k = 0; k < dists.size(); ++k) {
        double m = 0.0;
        for (std::size_t o = 0; o < dists[k].outcomes.size(); ++o) {
          m += dists[k].outcomes[o] * dists[k].probabilities[o];
        }
        means(static_cast<Eigen::Index>(k)) = m;
      }
      entry["z_hat_noiseless"] = TargetEstimate(fit.alpha, means);
    }
    states.push_back(entry);
    if (ex.error_scaling) {
      ScalingSetup setup = *ex.error_scaling;
      setup.seed = Stream(RequireSeed(ex, "error scaling"), kScalingStream, s);
      curves.push_back(TargetErrorScaling(state.name, evolver, X, fit.support,
                                          fit.alpha, ex.target->Z, state.rho,
                                          setup));
    }
  }
  j["states"] = states;
  if (!curves.empty()) {
    Json c = Json::array();
    for (const auto& curve : curves) c.push_back(CurveJson(curve));
    j["error_scaling"] = c;
    files.push_back(out.WriteCsv("target_error_scaling.csv", kScalingColumns,
                                 CurveRows(curves)));
  }
  files.insert(files.begin(), out.WriteJson("target.json", j));
  return files;
}

std::vector<std::string> RunGenericity(const Experiment& ex) {
  if (!ex.genericity) throw ConfigError("genericity needs a 'genericity' block");
  const std::uint64_t seed = RequireSeed(ex, "genericity");
  const GenericitySpec& g = *ex.genericity;
  const OutputDir out = Output(ex);
  TrialFactory factory;
  Json j = {{"command", "genericity"}, {"family", g.family}};
  if (g.family == "spin_chain") {
    factory = RandomSpinChainTrials(g.n_sites, g.eta);
  } else if (g.family == "random_unitary") {
    factory = RandomUnitaryTrials(g.dim, g.n_observables);
    j["counting_bounds"] = {
        {"unitary_possible",
         EvaluateCountingBounds(g.dim, g.n_observables).unitary_possible}};
  } else {
    factory = RandomDissipativeTrials(g.n_qubits);
  }
  j["summary"] = SummaryJson(GenericityTrials(
      factory, g.trials, DeriveSeed(seed, kGenericityStream),
      ex.selection.rank_policy));
  return {out.WriteJson("genericity.json", j)};
}

std::vector<std::string> RunReproduceSpinChain(const Experiment& ex) {
  const std::uint64_t seed = RequireSeed(ex, "reproduce spin-chain");
  const OutputDir out = Output(ex);
  const RankPolicy& policy = ex.selection.rank_policy;
  Json j = {{"command", "reproduce spin-chain"}};

  // Hamiltonian-only chain with unit coefficients.
  const ModelSystem closed = SpinChain(SpinChainParams::Uniform(4, 1.0, 0.0));
  j["hamiltonian_only"] =
      ReportJson(KalmanReport(GeneratorMatrix(closed.generator),
                              closed.measurements, policy));

  // Random Hamiltonian coefficients.
  const int trials = ex.genericity ? ex.genericity->trials : 100;
  j["random_hamiltonians"] = SummaryJson(GenericityTrials(
      RandomSpinChainTrials(4, 0.0), trials, DeriveSeed(seed, kGenericityStream),
      policy));

  // Dissipative chain.
  const ModelSystem open = SpinChain(SpinChainParams::Uniform(4, 1.0, 1.0));
  const Superoperator gen = GeneratorMatrix(open.generator);
  const MeasurementSet& X = open.measurements;
  Json dissipative = ReportJson(KalmanReport(gen, X, policy));
  const auto lambda2 = SlowestDecayEigenvalue(gen);
  dissipative["lambda2"] = lambda2 ? Cx(*lambda2) : Json(nullptr);
  const double horizon = ex.horizon.value_or(kSpinChainReproHorizon);
  const MeasurementPlan plan = GreedyPlan(gen, X, horizon, ex.selection);
  dissipative["plan"] = PlanJson(plan, X);
  j["dissipative"] = dissipative;

  std::vector<std::string> files = {
      out.WriteCsv("spin_chain_plan.csv", kPlanColumns, PlanRowsCsv(plan, X))};

  // Error scaling for the three test states.
  const Evolver evolver(gen);
  const std::vector<RowSpec> rows = PlanRows(plan);
  const StateEstimator estimator(BuildDesignMatrix(plan), ex.reconstruction);
  j["condition_number"] = estimator.condition_number();
  const std::vector<NamedState> states = {
      {"product_zero", ProductZeroState(4)},
      {"ghz", GhzState(4)},
      {"gibbs", GibbsState(open.generator.hamiltonian, 1.0)}};
  ScalingSetup setup = ex.error_scaling.value_or(ScalingSetup{});
  if (!ex.error_scaling) {
    setup.shots = {100, 1000, 10000, 100000, 1000000};
    setup.mode = ex.sampling;
  }
  std::vector<ScalingCurve> curves;
  Json c = Json::array();
  for (std::size_t s = 0; s < states.size(); ++s) {
    setup.seed = Stream(seed, kScalingStream, s);
    curves.push_back(StateErrorScaling(states[s].name, evolver, X, rows,
                                       estimator, states[s].rho, setup));
    c.push_back(CurveJson(curves.back()));
  }
  j["error_scaling"] = c;
  files.push_back(out.WriteCsv("spin_chain_error_scaling.csv", kScalingColumns,
                               CurveRows(curves)));
  files.insert(files.begin(), out.WriteJson("spin_chain.json", j));
  return files;
}

std::vector<std::string> RunReproduceNvCenter(const Experiment& ex) {
  const std::uint64_t seed = RequireSeed(ex, "reproduce nv-center");
  const OutputDir out = Output(ex);
  const RankPolicy& policy = ex.selection.rank_policy;
  const ModelSystem nv = NvCenter();
  const Superoperator gen = GeneratorMatrix(nv.generator);
  const Evolver evolver(gen);
  const MeasurementSet& X = nv.measurements;

  TargetSpec spec;
  spec.Z = *nv.target;
  spec.times = {0.0, 50.0};
  spec.observables = {"IZI"};
  const TargetFit fit = FitTarget(nv, gen, evolver, spec, policy);

  Json j = {{"command", "reproduce nv-center"}};
  j["report"] = ReportJson(KalmanReport(gen, X, policy));
  j["target"] = {{"reconstructable", fit.check.reconstructable},
                 {"relative_residual", fit.check.relative_residual},
                 {"fit_residual", fit.coefficients.residual},
                 {"alpha", AlphaJson(fit, X)}};

  ScalingSetup setup = ex.error_scaling.value_or(ScalingSetup{});
  if (!ex.error_scaling) {
    setup.shots = {100, 1000, 10000, 100000, 1000000};
    setup.mode = ex.sampling;
  }
  setup.seed = Stream(seed, kScalingStream, 0);
  const ScalingCurve curve =
      TargetErrorScaling("nv_separable", evolver, X, fit.support, fit.alpha,
                         spec.Z, NvSeparableState(), setup);
  j["error_scaling"] = Json::array({CurveJson(curve)});
  return {out.WriteJson("nv_center.json", j),
          out.WriteCsv("nv_center_target_error_scaling.csv", kScalingColumns,
                       CurveRows({curve}))};
}

}  // namespace dqst::cli
