#pragma once

// Provenance-stamped JSON and CSV artifacts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dqst::cli {

/// Shortest round-trip decimal form of a double.
std::string Format(double value);

class OutputDir {
 public:
  OutputDir(std::string dir, std::string config_hash,
            std::optional<std::uint64_t> seed);

  /// Writes `body` with schema, config_hash and seed fields added.
  std::string WriteJson(const std::string& name, nlohmann::json body) const;

  /// Writes a CSV whose first line is "# config_hash=…, seed=…".
  std::string WriteCsv(const std::string& name,
                       const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows) const;

 private:
  std::string Path(const std::string& name) const;

  std::string dir_;
  std::string config_hash_;
  std::optional<std::uint64_t> seed_;
};

}  // namespace dqst::cli
