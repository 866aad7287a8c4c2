#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bdlab/gaussian_measure.hpp"
#include "bdlab/spectral_basis.hpp"

namespace bdlab {

/// Flat run description. Subcommand keys carry defaults and are only consulted
/// by the subcommands that use them.
struct ExperimentConfig {
  TorusGeometry geometry;
  SobolevParams sobolev;
  int n = 2;
  int Nb = 4;
  double tau2 = 1.0;
  WeightRule weight = WeightRule::massive(1.0);
  bool zero_mode = true;
  std::string quad = "gh:40";
  std::uint64_t seed = 0;
  std::string out = "-";  ///< "-" writes to standard output
  std::optional<std::string> format;  ///< csv | json; per-subcommand default when absent

  std::size_t count = 10;
  std::string function = "bump:1";
  std::vector<double> point;  ///< empty means the origin
  std::vector<double> omega;  ///< empty means all ones
  std::vector<double> t_values{1.0, 0.5, 0.25, 0.125, 0.0625};
  int grid = 16;
  std::string connection;  ///< path to a connection file
  std::vector<double> flow{1.0};
  std::optional<double> duration;  ///< default L
  std::vector<double> start;
  int steps = 0;  ///< 0: max(256, 16 x the integrator minimum)
  double lambda = 0.1;
  std::string theta = "dilation:0";
  std::optional<int> margin;  ///< interior margin; default 5 for the dilation, 2 otherwise
  std::vector<int> spatial_modes{-1, 0, 1};

  QuadratureSpec quadrature() const { return QuadratureSpec::parse(quad, seed); }
  int effective_margin() const;
};

struct ConfigError {
  int line = 0;  ///< 0 for command-line overrides
  std::string key;
  std::string message;
  std::string describe() const;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return config.has_value(); }
};

/// One `key = value` per line, `#` starts a comment. Overrides are applied
/// after the file and may replace file keys. Never throws on malformed text.
ConfigResult parse_config(const std::string& text,
                          const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Keys accepted by parse_config.
const std::vector<std::string>& config_keys();

const std::vector<std::string>& subcommands();

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_veto = 3, exit_numerical = 4 };

/// Runs one subcommand and writes its artifact (atomically when `out` is a path).
/// Diagnostics go to `err`; `stdout_sink` receives the artifact when out is "-".
int run_experiment(const ExperimentConfig& config, const std::string& subcommand, std::ostream& err,
                   std::ostream& stdout_sink);

/// The artifact bytes run_experiment would write; throws the module exceptions.
std::string render_experiment(const ExperimentConfig& config, const std::string& subcommand);

}  // namespace bdlab
