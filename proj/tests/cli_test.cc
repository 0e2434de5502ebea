// Runs the dqst executable end to end and inspects exit codes and outputs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct CliRun {
  int status = -1;
  std::string err;
};

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dqst_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CliRun Dqst(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(DQST_CLI) + " " + args + " > " +
                          (dir / "stdout.txt").string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliRun run;
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  run.err = Slurp(err);
  return run;
}

std::string Config(const std::string& name) {
  return (fs::path(DQST_CONFIG_DIR) / name).string();
}

fs::path WriteConfig(const fs::path& dir, const Json& config) {
  const fs::path path = dir / "config.json";
  std::ofstream(path) << config.dump();
  return path;
}

TEST(CliTest, NvCenterReproduction) {
  const fs::path dir = Scratch("nv");
  const CliRun run = Dqst("reproduce nv-center --seed 1 --out " + dir.string(), dir);
  ASSERT_EQ(run.status, 0) << run.err;
  const Json j = Json::parse(Slurp(dir / "nv_center.json"));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["seed"], 1);
  EXPECT_EQ(j["report"]["rank"], 8);
  EXPECT_TRUE(j["target"]["reconstructable"].get<bool>());
  for (const Json& a : j["target"]["alpha"]) {
    const double expected = a["time"].get<double>() == 0.0 ? -1.0057 : 2.0057;
    EXPECT_NEAR(a["alpha"].get<double>(), expected, 1e-2);
  }
  EXPECT_NEAR(j["error_scaling"][0]["slope"].get<double>(), -1.0, 0.1);
}

TEST(CliTest, NonHermitianObservableExitsTwo) {
  const fs::path dir = Scratch("nonherm");
  const CliRun run =
      Dqst("analyze --config " + Config("non_hermitian.json") + " --out " +
               dir.string(),
           dir);
  EXPECT_EQ(run.status, 2);
  EXPECT_NE(run.err.find("system.observables[0]"), std::string::npos) << run.err;
  EXPECT_NE(run.err.find("bad"), std::string::npos);
}

TEST(CliTest, UnknownKeyExitsTwo) {
  const fs::path dir = Scratch("unknown");
  const fs::path cfg = WriteConfig(
      dir, {{"system", {{"hamiltonian", "pauli:Z"}, {"observables", {"pauli:X"}}}},
            {"shotz", 10}});
  EXPECT_EQ(Dqst("analyze --config " + cfg.string() + " --out " + dir.string(),
                 dir)
                .status,
            2);
}

TEST(CliTest, TargetOutsideObservableSubspaceExitsThree) {
  const fs::path dir = Scratch("infeasible");
  // H = σz, 𝒳 = {I, σz}: only span{I, σz} is observable.
  const fs::path cfg = WriteConfig(
      dir, {{"system", {{"hamiltonian", "pauli:Z"}, {"observables", {"pauli:Z"}}}},
            {"target", {{"observable", "pauli:X"}, {"times", {0.0, 1.0}}}}});
  const CliRun run =
      Dqst("target --config " + cfg.string() + " --out " + dir.string(), dir);
  EXPECT_EQ(run.status, 3);
  const Json err = Json::parse(run.err);
  EXPECT_EQ(err["reason"], "target_not_in_observable_subspace");
  EXPECT_EQ(err["rank"], 2);
}

TEST(CliTest, SimulateWithoutSeedExitsTwo) {
  const fs::path dir = Scratch("noseed");
  Json config = Json::parse(Slurp(Config("qubit_custom.json")));
  config.erase("seed");
  const fs::path cfg = WriteConfig(dir, config);
  const CliRun run =
      Dqst("simulate --config " + cfg.string() + " --out " + dir.string(), dir);
  EXPECT_EQ(run.status, 2);
  EXPECT_NE(run.err.find("seed"), std::string::npos) << run.err;
}

TEST(CliTest, SimulationIsDeterministicAndTagged) {
  const fs::path a = Scratch("det_a");
  const fs::path b = Scratch("det_b");
  const std::string args = "simulate --config " + Config("qubit_custom.json");
  ASSERT_EQ(Dqst(args + " --out " + a.string(), a).status, 0);
  ASSERT_EQ(Dqst(args + " --out " + b.string(), b).status, 0);
  const std::string records = Slurp(a / "records_plus.csv");
  EXPECT_EQ(records, Slurp(b / "records_plus.csv"));
  EXPECT_EQ(records.rfind("# config_hash=", 0), 0u);
  EXPECT_NE(records.find(", seed=3\n"), std::string::npos);

  const fs::path c = Scratch("det_c");
  ASSERT_EQ(Dqst(args + " --seed 4 --out " + c.string(), c).status, 0);
  const std::string other = Slurp(c / "records_plus.csv");
  EXPECT_NE(other.find(", seed=4\n"), std::string::npos);
  EXPECT_NE(other.substr(0, other.find(',')), records.substr(0, records.find(',')));
}

TEST(CliTest, AliasedSamplingLosesObservability) {
  const fs::path dir = Scratch("aliased");
  ASSERT_EQ(Dqst("analyze --config " + Config("qubit_aliased.json") +
                     " --out " + dir.string(),
                 dir)
                .status,
            0);
  const Json j = Json::parse(Slurp(dir / "analyze.json"));
  EXPECT_FALSE(j["observable"].get<bool>());
  EXPECT_FALSE(j["aliasing"]["ok"].get<bool>());
}

TEST(CliTest, ReconstructWritesEstimates) {
  const fs::path dir = Scratch("reconstruct");
  const CliRun run = Dqst("reconstruct --config " + Config("qubit_custom.json") +
                           " --out " + dir.string(),
                       dir);
  ASSERT_EQ(run.status, 0) << run.err;
  const Json j = Json::parse(Slurp(dir / "reconstruct.json"));
  const Json& s = j["states"][0];
  EXPECT_LT(s["eps2"].get<double>(), 0.05);
  EXPECT_NEAR(s["trace"][0].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(s["trace"][1].get<double>(), 0.0, 1e-9);
}

}  // namespace
