#pragma once

// CLI pipelines. Each returns the paths of the files it wrote.

#include <string>
#include <vector>

#include "config.h"

namespace dqst::cli {

std::vector<std::string> RunAnalyze(const Experiment& ex);
std::vector<std::string> RunSelect(const Experiment& ex);
std::vector<std::string> RunSimulate(const Experiment& ex);
std::vector<std::string> RunReconstruct(const Experiment& ex);
std::vector<std::string> RunTarget(const Experiment& ex);
std::vector<std::string> RunGenericity(const Experiment& ex);
std::vector<std::string> RunReproduceSpinChain(const Experiment& ex);
std::vector<std::string> RunReproduceNvCenter(const Experiment& ex);

}  // namespace dqst::cli
