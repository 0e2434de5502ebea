#include "output.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dqst::cli {

std::string Format(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buffer[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

OutputDir::OutputDir(std::string dir, std::string config_hash,
                     std::optional<std::uint64_t> seed)
    : dir_(std::move(dir)), config_hash_(std::move(config_hash)), seed_(seed) {
  std::filesystem::create_directories(dir_);
}

std::string OutputDir::Path(const std::string& name) const {
  return (std::filesystem::path(dir_) / name).string();
}

std::string OutputDir::WriteJson(const std::string& name,
                                 nlohmann::json body) const {
  body["schema"] = 1;
  body["config_hash"] = config_hash_;
  body["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
  const std::string path = Path(name);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body.dump(2) << "\n";
  return path;
}

std::string OutputDir::WriteCsv(
    const std::string& name, const std::vector<std::string>& columns,
    const std::vector<std::vector<std::string>>& rows) const {
  const std::string path = Path(name);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# config_hash=" << config_hash_
      << ", seed=" << (seed_ ? std::to_string(*seed_) : "none") << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << (c ? "," : "") << columns[c];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return path;
}

}  // namespace dqst::cli
