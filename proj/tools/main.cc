// dqst: command-line front end for dynamical state tomography experiments.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "commands.h"
#include "config.h"
#include "dqst/errors.h"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kInfeasible = 3, kNumerical = 4 };

int Fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump()
            << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dqst::cli;
  CLI::App app{"Dynamical quantum state tomography experiments"};
  std::vector<std::string> words;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol;
  bool psd_project = false;
  app.add_option("command", words,
                 "analyze | select | simulate | reconstruct | target | "
                 "genericity | reproduce spin-chain | reproduce nv-center")
      ->required()
      ->expected(1, 2);
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--tol", tol, "absolute rank threshold override");
  app.add_flag("--psd-project", psd_project,
               "project reconstructed states onto density matrices");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  std::string command = words[0];
  for (std::size_t i = 1; i < words.size(); ++i) command += " " + words[i];
  const bool reproduce = words[0] == "reproduce";
  try {
    using Runner = std::vector<std::string> (*)(const Experiment&);
    Runner run = nullptr;
    if (command == "analyze") run = RunAnalyze;
    if (command == "select") run = RunSelect;
    if (command == "simulate") run = RunSimulate;
    if (command == "reconstruct") run = RunReconstruct;
    if (command == "target") run = RunTarget;
    if (command == "genericity") run = RunGenericity;
    if (command == "reproduce spin-chain") run = RunReproduceSpinChain;
    if (command == "reproduce nv-center") run = RunReproduceNvCenter;
    if (run == nullptr) throw ConfigError("unknown command '" + command + "'");
    if (!reproduce && command != "genericity" && config_path.empty()) {
      throw ConfigError(command + " needs --config");
    }
    Json config = config_path.empty() ? Json::object() : ReadConfigFile(config_path);
    const Experiment ex = BuildExperiment(
        std::move(config), Overrides{seed, out, tol, psd_project},
        !reproduce && command != "genericity");
    for (const std::string& path : run(ex)) std::cout << path << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    return Fail(kConfig, "config", e.what());
  } catch (const dqst::InfeasibleError& e) {
    std::cerr << nlohmann::json{{"error", "infeasible"},
                                {"reason", e.reason()},
                                {"rank", e.rank()},
                                {"required", e.required()},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return kInfeasible;
  } catch (const dqst::NumericalError& e) {
    return Fail(kNumerical, "numerical", e.what());
  } catch (const std::invalid_argument& e) {
    return Fail(kConfig, "invalid_input", e.what());
  } catch (const std::exception& e) {
    return Fail(kNumerical, "failure", e.what());
  }
}
