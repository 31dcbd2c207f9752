#ifndef QMB_EXPERIMENT_HPP
#define QMB_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qmb::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Config validation failure; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::string format = "csv";  // csv | json
  std::string circuit_path;    // overrides the config's circuit_file
  std::string command_line = "qmb";
};

struct RunManifest {
  std::string command;
  std::string config_digest;  // FNV-1a 64 over the canonical config bytes
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::string toolkit_version;
};

nlohmann::json load_config(const std::string& path);

// Runs one experiment described by a JSON config, writing the data series
// and a manifest JSON into opts.out_dir. Identical config and seed produce
// byte-identical data files. Sweep rows are ordered by sweep value with
// per-point seeds seed XOR splitmix64(point index).
RunManifest run_experiment(const nlohmann::json& config, const RunOptions& opts);

}  // namespace qmb::cli

#endif
