#pragma once

// JSON configuration loading for the CLI.  A config document has three
// sections:
//
//   params     : fluid parameters (all optional, defaults below)
//   experiment : {"kind": <name>, ...kind-specific knobs}
//   output     : {"directory": <path>}
//
// Unknown keys anywhere are rejected with the offending JSON path in the
// message, and every physical constraint is re-checked on load.

#include "nsplab/decay.hpp"
#include "nsplab/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nsplab {

enum class ExperimentKind {
  eigen,
  green_check,
  decay,
  lower_bound,
  compare_ns,
  kernel_lp,
  simulate,
};

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct EigenConfig {
  double r_min = 1e-3;
  double r_max = 1e3;
  int samples = 241;
};

struct GreenCheckConfig {
  double r_min = 1e-2;
  double r_max = 10.0;
  double t_max = 20.0;
  int r_samples = 20;
  int t_samples = 20;
};

struct DecayConfig {
  FitWindow window;
  std::vector<int> k_values = {0};  // L2 derivative weights to evolve
  bool linf = false;
  bool l4 = false;
};

struct LowerBoundConfig {
  double R = 5.0;
  FitWindow band_window;
};

struct CompareNsConfig {
  FitWindow window;
};

struct KernelLpConfig {
  std::vector<double> lp = {2.0};  // entries may be "inf" in JSON
  std::vector<int> alpha = {0};
  double r_cut = 1.0;
  FitWindow window;
};

struct SimulateConfig {
  GridSpec grid;
  StepperConfig stepper;
  std::string initial = "trig";  // "trig" or "seeded"
  double eps = 1e-4;
  std::uint64_t seed = 12345;
  bool write_final_grid = true;
};

struct Config {
  FluidParams params;
  ExperimentKind kind = ExperimentKind::eigen;
  EigenConfig eigen;
  GreenCheckConfig green_check;
  DecayConfig decay;
  LowerBoundConfig lower_bound;
  CompareNsConfig compare_ns;
  KernelLpConfig kernel_lp;
  SimulateConfig simulate;
  std::string output_dir = ".";
  std::uint64_t hash = 0;          // FNV-1a of the canonical dump
  nlohmann::ordered_json echo;     // parsed document, for the manifest
};

// FNV-1a 64-bit over bytes.
std::uint64_t fnv1a(const std::string& bytes);

// Sorted-key, whitespace-free dump; the hash input, stable under key
// reordering in the source document.
std::string canonical_json(const nlohmann::ordered_json& j);

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

}  // namespace nsplab
