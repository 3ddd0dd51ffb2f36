#pragma once

#include <string>

#include <json.hpp>

#include "fsi/config.hpp"
#include "fsi/generator.hpp"
#include "fsi/io.hpp"

namespace fsi {

struct RunOutcome {
  nlohmann::json result;
  bool ok = true;          // false: a validation check failed (exit 2)
  double assembly_seconds = 0.0;
  double experiment_seconds = 0.0;
};

/// Runs cfg.experiment and writes its CSV/JSON files through `out`. Does not
/// write the manifest; see write_manifest.
RunOutcome run_experiment(const RunConfig& cfg, OutputWriter& out);

/// Invariant suite used by the validate experiment: dissipativity, projection
/// idempotence, Robin constants, generator consistency and the inverse at zero.
nlohmann::json validation_suite(const Generator& gen, unsigned seed, int samples);

/// target: generator (A_red), metric (M_red), basis (N), or all.
void dump_matrices(const RunConfig& cfg, const std::string& target, OutputWriter& out);

/// Config echo, versions, timings, grid, rho and seed, then the file hashes.
void write_manifest(const RunConfig& cfg, const std::string& command, const RunOutcome& outcome,
                    OutputWriter& out);

}  // namespace fsi
