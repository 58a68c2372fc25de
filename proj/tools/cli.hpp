#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <bsdloc/experiments.hpp>
#include <bsdloc/synthetic_city.hpp>

namespace bsdloc::cli {

/// Everything an experiment run depends on. Defaults, then the JSON config
/// file, then command-line flags.
struct ExperimentConfig {
  std::string map;
  std::string osm;
  std::optional<SyntheticCityParams> synth;
  std::string db;
  double spacing = 10.0;
  SectorSpec sector;
  std::size_t max_length = 40;
  std::vector<std::size_t> lengths = {15, 30};
  std::vector<double> qs = {0.6, 0.75, 0.9, 1.0};
  double q = 0.75;
  std::size_t routes = 150;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::vector<std::string> methods = {"turns_only", "bsd_only", "bsd+turns"};
  unsigned threads = 1;
  SessionConfig session;

  /// Throws ConfigError on non-positive counts, q outside [0, 1] or unknown methods.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a JSON object; unknown keys are rejected.
void apply_config_json(ExperimentConfig& config, const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical JSON of the resolved configuration; hashed into every CSV.
std::string canonical_config(const ExperimentConfig& config, const std::string& command);

/// Runs the command line. Results go to files under --out and a short summary
/// to `out`; failures print one JSON error line to `err` and return nonzero.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsdloc::cli
