#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thbq/multi_index.hpp"

namespace thbq {

/// Experiment description read from a JSON document. Integer vector fields
/// accept a scalar (same value in every direction) or an array of length dim.
struct ExperimentConfig {
  std::string kind;  // converge-projection, adapt-project, adapt-poisson, derham-check, mesh-info, mesh-svg
  int dim = 2;
  Ivec degree{2, 2, 0};
  int multiplicity = 1;
  int admissibility_class = 2;
  double theta_refine = 0.5;
  double theta_coarsen = 0.0;
  int coarsen_every = 0;
  double tolerance = 1e-4;
  int max_iterations = 25;
  int max_levels = 10;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  Ivec elements{16, 16, 1};           // level-0 elements per direction
  std::vector<int> mesh_sizes{4, 8, 16};  // converge-projection: level-0 elements per direction
  std::string target = "tanh-ring";   // adapt-project: tanh-ring or sine
  int levels = 1;                     // random hierarchies: number of levels
  double fraction = 0.3;              // random hierarchies: marking probability
  std::string hierarchy;              // optional hierarchy document overriding the random one
  double front_alpha = 60.0;          // adapt-poisson: atan(alpha (r - r0)) around center
  double front_radius = 0.5;
  double front_center[2] = {-0.1, -0.1};
  bool svg = true;                    // write mesh_stepNNN.svg for two-dimensional runs
};

/// Parses and validates a config; unknown fields and out-of-range values
/// throw ConfigError.
ExperimentConfig parse_experiment(const std::string& json_text);
ExperimentConfig read_experiment(const std::string& path);

struct ExperimentResult {
  int exit_code = 0;  // 0 success, 2 verification failure
  std::vector<std::string> artifacts;  // file names written to the output directory
  std::string summary;
};

/// Runs the experiment, writing its artifacts into cfg.output_dir (created if
/// needed). Progress lines go to `log` when it is not null.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace thbq
