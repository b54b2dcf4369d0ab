#ifndef OTTO_CLI_HPP
#define OTTO_CLI_HPP

// Config ingestion, CSV rendering and the invariant suite behind the `otto`
// command-line tool.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "otto/engine.hpp"

namespace otto::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kValidationFailure = 4,
};

// Malformed or inconsistent configuration. Messages carry "source:line:col:"
// when the offending YAML node is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string name;
  engine::CycleSpec spec;
  std::string output_dir = ".";

  // One "key = value" line per setting, numbers at full precision.
  std::string canonical() const;
  // FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
std::string preset_yaml(std::string_view name);
RunConfig preset(std::string_view name);

engine::Stroke parse_stroke(std::string_view text);
std::vector<double> parse_tau_list(std::string_view text);

// Default tau list for `adiabat`: the stroke's grid, densified to resolve the
// oscillation period.
std::vector<double> default_adiabat_taus(const RunConfig& config, engine::Stroke stroke);

std::string adiabat_csv(const RunConfig& config, engine::Stroke stroke,
                        const std::vector<double>& taus);
std::string protocol_csv(const RunConfig& config, engine::Stroke stroke, int samples);

struct SweepCsv {
  std::string cloud;
  std::string frontier;
  std::string mean_cloud;
  std::string summary;

  bool operator==(const SweepCsv&) const = default;
};

SweepCsv sweep_csv(const RunConfig& config, const engine::SweepResult& result);

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  // "<=" or ">=": how measured must compare with threshold.
  std::string relation = "<=";
  bool passed = false;
};

struct ValidationReport {
  std::string config_name;
  std::vector<Check> checks;

  bool passed() const;
  std::string render() const;
};

ValidationReport validate(const RunConfig& config, unsigned threads = 0);

int run(int argc, char** argv);

}  // namespace otto::cli

#endif  // OTTO_CLI_HPP
