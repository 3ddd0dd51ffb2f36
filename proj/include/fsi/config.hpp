#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsi/geometry.hpp"

namespace fsi {

struct SimulateOptions {
  double t_final = 1.0;
  double dt = 0.0;                 // 0: h^2/4
  std::string scheme = "implicit_midpoint";
  std::string initial = "random";  // random | slowest
  int snapshot_every = 0;
  double fit_window = 0.2;
  std::string fit = "auto";        // auto | exponential | rational
};

struct SweepOptions {
  int linear_points = 100;
  double linear_max = 10.0;
  int log_points = 100;
  double beta_max = 0.0;           // 0: 1e3 times the spectral radius
};

struct InvertOptions {
  int samples = 5;
  std::vector<double> betas{0.0, 1.0, 10.0};
};

struct LqrOptions {
  std::string control = "point";  // point | boundary
  std::vector<std::array<double, 2>> locations{{0.5, 0.5}};
  std::vector<double> weights;
  std::vector<Eigen::Index> sigma{0};
  std::string observation = "identity";  // identity | plate
  double horizon = 0.0;            // 0: infinite
  int steps = 400;
  int cost_samples = 5;
  double cost_dt = 1e-3;
  std::vector<int> gain_grids;     // extra grids for the gain-norm table
};

struct RunConfig {
  GeometryConfig geometry;
  double rho = 0.0;
  std::string experiment = "validate";
  unsigned seed = 1;
  unsigned threads = 1;
  int validate_samples = 100;
  int spectrum_count = -1;
  SimulateOptions simulate;
  SweepOptions sweep;
  InvertOptions invert;
  LqrOptions lqr;
  std::string output_directory = "fsi_out";
  std::vector<std::string> formats{"csv", "json"};
  nlohmann::json source;           // the parsed file, echoed into the manifest

  bool wants(const std::string& format) const;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"simulate", "spectrum", "sweep", "invert", "lqr", "validate"};
  return names;
}

/// Parses and validates a config document. Errors name the offending field
/// as section.key and are thrown as ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// FSI_OUTPUT_DIR and FSI_THREADS; nothing else is read from the environment.
void apply_environment(RunConfig& cfg);

}  // namespace fsi
