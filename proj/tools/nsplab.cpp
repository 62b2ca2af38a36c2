#include "nsplab/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

const char* kind_help(const std::string& kind) {
  if (kind == "eigen") return "Tabulate mode eigenvalues and asymptotic residuals";
  if (kind == "green-check") return "Compare the closed-form propagator against a matrix exponential";
  if (kind == "decay") return "Evolve norms of the canonical workload and fit decay exponents";
  if (kind == "lower-bound") return "Certify the oscillatory lower-bound machinery (F_min, ratio band)";
  if (kind == "compare-ns") return "Contrast momentum decay with the coupling on vs off";
  if (kind == "kernel-lp") return "Fit low-frequency kernel L^q slopes under the smooth cutoff";
  if (kind == "simulate") return "Run the periodic-box nonlinear solver";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nsplab: numerical laboratory for a viscous compressible fluid with "
      "electrostatic coupling"};
  app.require_subcommand(1);
  app.footer(
      "Config defaults: params {mu=1, nu=0, sound_speed=1, debye=1, rho_bar=1,\n"
      "gamma=2, poisson=true}; decay/compare-ns/kernel-lp window [1e2, 1e4];\n"
      "lower-bound R=5; simulate {n=32, box=40, dt=0.02, t_end=20, scheme=2,\n"
      "initial=trig, eps=1e-4}.  Output directory precedence: NSPLAB_OUT,\n"
      "--out, output.directory, \".\".");

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 1;

  const std::vector<std::string> kinds = {"eigen",      "green-check", "decay",
                                          "lower-bound", "compare-ns",  "kernel-lp",
                                          "simulate"};
  for (const auto& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, kind_help(kind));
    sub->add_option("--config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (NSPLAB_OUT overrides)");
    sub->add_option("--seed", seed, "override the RNG seed for seeded initial data");
    sub->add_option("--threads", threads, "worker threads (accepted; runs are serial)")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    const nsplab::Config cfg = nsplab::load_config(config_path);
    if (nsplab::kind_name(cfg.kind) != sub->get_name()) {
      std::fprintf(stderr,
                   "error: subcommand \"%s\" does not match config experiment kind \"%s\"\n",
                   sub->get_name().c_str(), nsplab::kind_name(cfg.kind).c_str());
      return 2;
    }
    nsplab::RunOptions opts;
    opts.cli_out = out_dir;
    opts.has_seed = sub->count("--seed") > 0;
    opts.seed = seed;
    opts.threads = threads;
    return nsplab::run_experiment(cfg, opts);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
}
