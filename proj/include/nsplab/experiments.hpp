#pragma once

// Experiment orchestration: dispatches a validated Config to the right
// module, writes CSV series + a JSON report + the run manifest into the
// output directory, and reports overall success.
//
// Output directory precedence: NSPLAB_OUT environment variable, then the
// --out CLI flag, then output.directory from the config, then ".".
// On any error the partial artifacts of this run are removed and the
// manifest records the failure cause; the exit code is 0 iff every
// internal invariant check passed.

#include "nsplab/config.hpp"
#include "nsplab/report.hpp"

#include <filesystem>
#include <string>

namespace nsplab {

struct RunOptions {
  std::string cli_out;  // --out; empty means not given
  bool has_seed = false;
  std::uint64_t seed = 0;
  int threads = 1;      // accepted for forward compatibility; runs are serial
};

std::filesystem::path resolve_out_dir(const Config& cfg, const RunOptions& opts);

int run_experiment(const Config& cfg, const RunOptions& opts);

}  // namespace nsplab
