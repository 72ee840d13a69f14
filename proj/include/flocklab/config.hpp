#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "flocklab/controllers.hpp"
#include "flocklab/experiments.hpp"
#include "flocklab/integrator.hpp"
#include "flocklab/kernel.hpp"

namespace flocklab {

/// Configuration problem tied to a specific field. path() is the dotted
/// location of the offending field ("sim.dt", "controller.gamma", ...), or
/// the file name for read/parse failures.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Initial-condition section: either a seeded random state rescaled to the
/// requested dispersions, or a state file written by `ic-gen` / `simulate`.
struct ICSection {
  std::uint64_t seed = 1;
  double X0 = 1.0;
  double V0 = 1.0;
  std::string file;  // non-empty: read the state from this CSV instead
};

struct ExperimentSection {
  std::vector<double> X_values;
  std::vector<double> V_values;
  int samples_per_cell = 20;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0: one worker per hardware thread
};

struct OutputSection {
  std::string directory;  // empty: $FLOCKLAB_OUTPUT_DIR, else "."
  std::vector<std::string> formats = {"csv", "json", "gnuplot"};

  bool wants(const std::string& format) const;
};

struct RunConfig {
  std::size_t agents = 2;
  std::size_t dim = 2;
  KernelSpec kernel = KernelSpec::power_law(1.0);
  ControllerSpec controller = NoController{};
  SimConfig sim;
  ICSection ic;
  std::optional<ExperimentSection> experiment;
  OutputSection output;

  /// Assemble the sweep runner's input; requires the experiment section.
  SweepConfig sweep_config() const;
};

/// Strict parse: unknown keys, wrong types, and out-of-range values all throw
/// ConfigError naming the field.
RunConfig config_from_json(const nlohmann::json& doc);

/// Canonical echo with every section and default filled in; feeding it back
/// through config_from_json reproduces the same configuration.
nlohmann::json config_to_json(const RunConfig& config);

RunConfig load_config_file(const std::string& path);

/// Apply one "dotted.path=value" assignment to a raw document (the --set
/// flag). The value is parsed as JSON when possible, otherwise kept as a
/// string. Missing intermediate objects are created.
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json kernel_to_json(const KernelSpec& kernel);
KernelSpec kernel_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json controller_to_json(const ControllerSpec& controller);
ControllerSpec controller_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace flocklab
