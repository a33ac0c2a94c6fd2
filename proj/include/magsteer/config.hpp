#pragma once

// Run configuration: a nested YAML file and/or `key=value` overrides.
//
// Keys are dotted paths (`system.kappa_a`, `run.grid`). The `system.` prefix
// may be omitted. Physical values are a number optionally followed by a unit
// (`10 GHz`, `20mK`, `0.49 kappa_a`); a bare number is read in the key's
// default unit, listed by describe_keys().

#include <filesystem>
#include <string>
#include <vector>

#include "magsteer/errors.hpp"
#include "magsteer/model.hpp"

namespace magsteer {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Fixed choices for the figure scenarios the source figures leave open.
struct ScenarioConfig {
  double r = 1.0;        // ratio and dissipation sweeps
  double lambda = 0.49;  // kappa_a
  double threshold_r = 2.0;
  double threshold_lambda = 0.49;
  double ratio_min = 0.5;
  double ratio_max = 2.0;
  double kappa_min = 0.1;
  double kappa_max = 1.0;
  double r_max = 2.0;
  double lambda_max = 0.49;
  double t_max = 1.0;  // K, upper end of temperature sweeps
};

struct RunConfig {
  SystemSpec spec = default_spec();
  ScenarioConfig scenario;
  std::filesystem::path out_dir = "magsteer_out";
  bool plot = false;
  int grid = 101;
  int grid_2d = 61;
  unsigned threads = 0;
};

/// Applies one setting; throws ConfigError naming the key on unknown keys or
/// malformed values.
void apply_setting(RunConfig& config, const std::string& key,
                   const std::string& value);

/// Splits `key=value` and applies it.
void apply_assignment(RunConfig& config, const std::string& assignment);

/// Reads a YAML file into `config`. Every problem is appended to
/// `violations` instead of stopping at the first one. Throws ConfigError only
/// when the file cannot be read or parsed.
void load_config_file(RunConfig& config, const std::filesystem::path& path,
                      std::vector<std::string>& violations);

/// Invariant violations of an assembled configuration (empty when valid).
std::vector<std::string> validate(const RunConfig& config);

/// Every key at its resolved value, in default units, as one-line JSON.
std::string resolved_config_json(const RunConfig& config);

/// Help text listing each key with its default unit.
std::string describe_keys();

}  // namespace magsteer
