#include "nsplab/experiments.hpp"

#include "nsplab/grid_io.hpp"
#include "nsplab/matrix_exp.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace nsplab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1));
  return g;
}

struct Ols {
  double slope = 0.0;
  double intercept = 0.0;
};

Ols ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Ols o;
  o.slope = sxy / sxx;
  o.intercept = my - o.slope * mx;
  return o;
}

json p_label(double lp) {
  if (std::isinf(lp)) return json("inf");
  return json(lp);
}

json fit_entry(const std::string& field, double lp, int k, const DecayFit& f,
               double tol) {
  json j;
  j["field"] = field;
  j["p"] = p_label(lp);
  j["k"] = k;
  j["exponent"] = f.exponent;
  j["stderr"] = f.stderr_;
  j["target"] = f.target;
  j["tolerance"] = tol;
  j["pass"] = std::abs(f.exponent - f.target) <= tol;
  j["n_points"] = f.n_points;
  j["window"] = {f.window.t_min, f.window.t_max};
  return j;
}

double fit_tolerance(double lp) {
  if (lp == 2.0) return 0.05;
  if (std::isinf(lp)) return 0.1;
  return 0.08;
}

// Positive root of the oscillatory/overdamped boundary
// (2mu+nu)^2 r^4 = 4 (c^2 r^2 + coupling).
double regime_boundary_radius(const FluidParams& p) {
  const double tf2 = p.theta_full() * p.theta_full();
  const double c2 = p.sound_speed * p.sound_speed;
  const double r2 = (2.0 * c2 + 2.0 * std::sqrt(c2 * c2 + tf2 * p.coupling())) / tf2;
  return std::sqrt(r2);
}

// ---------------------------------------------------------------------------

bool run_eigen(const Config& cfg, const fs::path& dir,
               std::vector<std::string>& artifacts) {
  const FluidParams& p = cfg.params;
  const auto& e = cfg.eigen;

  CsvTable table;
  table.header = {"r",           "lambda_plus_re",  "lambda_plus_im",
                  "lambda_minus_re", "lambda_minus_im", "lambda_zero",
                  "discriminant", "b",               "char_residual"};
  for (double r : log_grid(e.r_min, e.r_max, e.samples)) {
    const EigenTriple et = eigen_decompose(p, r);
    const double b = et.regime == SpectralRegime::oscillatory
                         ? oscillation_frequency(p, r)
                         : std::numeric_limits<double>::quiet_NaN();
    table.add_numeric_row({r, et.lambda_plus.real(), et.lambda_plus.imag(),
                           et.lambda_minus.real(), et.lambda_minus.imag(),
                           et.lambda_zero, et.discriminant, b,
                           characteristic_residual(p, r, et.lambda_plus)});
  }
  write_csv(dir / "eigen.csv", table);
  artifacts.push_back("eigen.csv");

  json rep;
  rep["kind"] = "eigen";
  bool pass = true;

  // Low-frequency dispersive residual b - (1/lam + lam c^2 r^2/2) = O(r^4);
  // only meaningful with the coupling on.
  if (p.poisson) {
    const auto rows = asymptotic_check(p, log_grid(1e-3, 1e-1, 40), {1.0});
    std::vector<double> lx, ly;
    for (const auto& row : rows)
      if (std::isfinite(row.err_b) && row.err_b > 0.0) {
        lx.push_back(std::log(row.r));
        ly.push_back(std::log(row.err_b));
      }
    const Ols o = ols_fit(lx, ly);
    rep["b_residual_slope"] = o.slope;
    rep["b_residual_slope_target"] = 4.0;
    rep["b_residual_slope_pass"] = std::abs(o.slope - 4.0) <= 0.2;
    pass = pass && std::abs(o.slope - 4.0) <= 0.2;
    rep["r_star"] = regime_boundary_radius(p);
  }

  // High-frequency eigenvalue residuals against the leading forms decay
  // with r; require the fitted log-log slope to be clearly negative.
  {
    const auto rows = asymptotic_check(p, log_grid(10.0, 1e3, 40), {1.0});
    std::vector<double> lx, ly;
    for (const auto& row : rows) {
      const double err = row.err_lam_plus + row.err_lam_minus;
      if (err > 0.0) {
        lx.push_back(std::log(row.r));
        ly.push_back(std::log(err));
      }
    }
    const Ols o = ols_fit(lx, ly);
    rep["high_freq_residual_slope"] = o.slope;
    rep["high_freq_residual_slope_max"] = -0.8;
    rep["high_freq_residual_slope_pass"] = o.slope <= -0.8;
    pass = pass && o.slope <= -0.8;
  }

  // Uniform high-frequency envelope rate (must be positive).
  {
    const EnvelopeFit env =
        high_freq_envelope(p, 10.0, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0});
    rep["envelope_rate"] = env.rate;
    rep["envelope_log_prefactor"] = env.log_prefactor;
    rep["envelope_rate_pass"] = env.rate > 0.0;
    pass = pass && env.rate > 0.0;
  }

  rep["pass"] = pass;
  write_json(dir / "eigen_report.json", rep);
  artifacts.push_back("eigen_report.json");
  return pass;
}

// ---------------------------------------------------------------------------

bool run_green_check(const Config& cfg, const fs::path& dir,
                     std::vector<std::string>& artifacts) {
  const FluidParams& p = cfg.params;
  const auto& g = cfg.green_check;
  const Vec3 u(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0);

  CsvTable table;
  table.header = {"r", "t", "max_abs_err"};
  double max_err = 0.0;
  const auto rs = log_grid(g.r_min, g.r_max, g.r_samples);
  const auto ts = log_grid(g.t_max * 1e-3, g.t_max, g.t_samples);
  for (double r : rs)
    for (double t : ts) {
      const Vec3 xi = r * u;
      const Mat4c exact = green_matrix(p, xi, t);
      const Mat4c oracle = matrix_exp(assemble_symbol(p, xi), t);
      const double err = (exact - oracle).cwiseAbs().maxCoeff();
      max_err = std::max(max_err, err);
      table.add_numeric_row({r, t, err});
    }
  write_csv(dir / "green_check.csv", table);
  artifacts.push_back("green_check.csv");

  // t = 0 must give the identity exactly.
  double identity_err = 0.0;
  for (double r : rs) {
    const Mat4c g0 = green_matrix(p, r * u, 0.0);
    identity_err =
        std::max(identity_err, (g0 - Mat4c::Identity()).cwiseAbs().maxCoeff());
  }

  // Probe straight through the regime boundary where the propagator
  // formulas become confluent.
  double boundary_err = 0.0;
  if (p.theta_full() > 0.0) {
    const double r_star = regime_boundary_radius(p);
    for (double dr : {-1e-3, -5e-4, 0.0, 5e-4, 1e-3})
      for (double t : {0.5, 2.0, 10.0}) {
        const Vec3 xi = (r_star + dr) * u;
        const double err =
            (green_matrix(p, xi, t) - matrix_exp(assemble_symbol(p, xi), t))
                .cwiseAbs()
                .maxCoeff();
        boundary_err = std::max(boundary_err, err);
      }
  }

  const bool pass = max_err <= 1e-10 && identity_err <= 1e-14 && boundary_err <= 1e-10;
  json rep;
  rep["kind"] = "green-check";
  rep["max_abs_err"] = max_err;
  rep["identity_err"] = identity_err;
  rep["boundary_err"] = boundary_err;
  rep["tolerance"] = 1e-10;
  rep["pass"] = pass;
  write_json(dir / "green_check_report.json", rep);
  artifacts.push_back("green_check_report.json");
  return pass;
}

// ---------------------------------------------------------------------------

std::string field_name(Field f) {
  switch (f) {
    case Field::density: return "n";
    case Field::momentum: return "m";
    case Field::electric: return "E";
  }
  return "?";
}

std::string column_name(const NormRequest& r) {
  std::string name = "norm_" + field_name(r.field);
  for (char& c : name) c = static_cast<char>(std::tolower(c));
  if (std::isinf(r.p)) name += "_linf";
  else if (r.p == 2.0) name += "_l2";
  else name += "_l4";
  if (r.k > 0) name += "_k" + std::to_string(r.k);
  return name;
}

bool run_decay(const Config& cfg, const fs::path& dir,
               std::vector<std::string>& artifacts) {
  const FluidParams& p = cfg.params;
  const auto& d = cfg.decay;

  std::vector<NormRequest> reqs;
  reqs.push_back({Field::density, 2.0, 0});
  reqs.push_back({Field::momentum, 2.0, 0});
  if (p.poisson) reqs.push_back({Field::electric, 2.0, 0});
  const double inf = std::numeric_limits<double>::infinity();
  if (d.linf) {
    reqs.push_back({Field::density, inf, 0});
    reqs.push_back({Field::momentum, inf, 0});
  }
  if (d.l4) {
    reqs.push_back({Field::density, 4.0, 0});
    reqs.push_back({Field::momentum, 4.0, 0});
  }
  for (int k : d.k_values) {
    if (k == 0) continue;
    reqs.push_back({Field::density, 2.0, k});
    reqs.push_back({Field::momentum, 2.0, k});
    if (p.poisson) reqs.push_back({Field::electric, 2.0, k});
  }

  EvolveOptions opts;
  opts.window = d.window;
  const InitialData init = InitialData::canonical();
  const auto series = evolve_norm_series(p, init, reqs, opts);

  CsvTable table;
  table.header = {"t"};
  for (const auto& s : series) table.header.push_back(column_name(s.request));
  for (size_t i = 0; i < series[0].t.size(); ++i) {
    std::vector<double> row = {series[0].t[i]};
    for (const auto& s : series) row.push_back(s.value[i]);
    table.add_numeric_row(row);
  }
  write_csv(dir / "decay.csv", table);
  artifacts.push_back("decay.csv");

  bool pass = true;
  json rep;
  rep["kind"] = "decay";
  json fits = json::array();
  std::vector<DecayFit> all_fits;
  for (const auto& s : series) {
    const DecayFit f = fit_series(p, s, d.window);
    all_fits.push_back(f);
    const double tol = fit_tolerance(s.request.p);
    fits.push_back(fit_entry(field_name(s.request.field), s.request.p, s.request.k, f, tol));
    pass = pass && std::abs(f.exponent - f.target) <= tol;
  }
  rep["fits"] = fits;

  // Momentum and electric share the decay rate.
  if (p.poisson) {
    const double gap = std::abs(all_fits[1].exponent - all_fits[2].exponent);
    rep["m_e_exponent_gap"] = gap;
    rep["m_e_exponent_gap_pass"] = gap <= 0.03;
    pass = pass && gap <= 0.03;
  }

  // The (period-averaged) L2 norms must be nonincreasing over the window.
  {
    bool monotone = true;
    const size_t n_l2 = p.poisson ? 3 : 2;
    for (size_t si = 0; si < n_l2; ++si)
      for (size_t i = 1; i < series[si].value.size(); ++i)
        if (series[si].value[i] > series[si].value[i - 1] * (1.0 + 1e-9)) monotone = false;
    rep["l2_monotone_pass"] = monotone;
    pass = pass && monotone;
  }

  // Each derivative weight shifts the exponent by -k/2.
  {
    json shifts = json::array();
    for (size_t a = 0; a < reqs.size(); ++a)
      for (size_t b = 0; b < reqs.size(); ++b) {
        if (reqs[a].k != 0 || reqs[b].k <= 0) continue;
        if (reqs[a].field != reqs[b].field || reqs[a].p != 2.0 || reqs[b].p != 2.0)
          continue;
        const double shift = all_fits[b].exponent - all_fits[a].exponent;
        const double target = -0.5 * reqs[b].k;
        json sj;
        sj["field"] = field_name(reqs[a].field);
        sj["k"] = reqs[b].k;
        sj["shift"] = shift;
        sj["target"] = target;
        sj["pass"] = std::abs(shift - target) <= 0.05;
        shifts.push_back(sj);
        pass = pass && std::abs(shift - target) <= 0.05;
      }
    if (!shifts.empty()) rep["derivative_shifts"] = shifts;
  }

  rep["pass"] = pass;
  write_json(dir / "decay_report.json", rep);
  artifacts.push_back("decay_report.json");
  return pass;
}

// ---------------------------------------------------------------------------

bool run_lower_bound(const Config& cfg, const fs::path& dir,
                     std::vector<std::string>& artifacts) {
  const FluidParams& p = cfg.params;
  const auto& l = cfg.lower_bound;
  const QuadratureSpec qspec;
  const InitialData init = InitialData::canonical();

  const LowerBoundReport rep = verify_lower_bound(p, init, l.R, l.band_window, qspec);
  if (!rep.precondition_ok) {
    std::ostringstream msg;
    msg << "lower-bound precondition failed: need R > sqrt(7 pi) / (c sqrt(lambda)) = "
        << std::sqrt(7.0 * kPi) / (p.sound_speed * std::sqrt(p.debye))
        << " and a certified positive initial floor (got R = " << l.R << ")";
    throw std::runtime_error(msg.str());
  }

  // Two full periods of F for the record.
  const double period = p.debye * kPi;
  CsvTable table;
  table.header = {"t", "F"};
  for (int i = 0; i < 400; ++i) {
    const double t = 2.0 * period * i / 400.0;
    table.add_numeric_row({t, F_of_t(p, t, l.R, qspec)});
  }
  write_csv(dir / "lower_bound_f.csv", table);
  artifacts.push_back("lower_bound_f.csv");

  json j;
  j["kind"] = "lower-bound";
  j["R"] = rep.R;
  j["f_min_numeric"] = rep.f_min_numeric;
  j["f_max_numeric"] = rep.f_max_numeric;
  j["f_min_analytic"] = rep.f_min_analytic;
  j["f_min_verdict"] = rep.f_min_numeric >= rep.f_min_analytic;
  j["periodicity_defect"] = rep.periodicity_defect;
  j["band_min"] = rep.band_min;
  j["band_max"] = rep.band_max;
  j["band_ratio"] = rep.band_max / rep.band_min;
  j["precondition_ok"] = rep.precondition_ok;
  j["pass"] = rep.pass;
  write_json(dir / "lower_bound_report.json", j);
  artifacts.push_back("lower_bound_report.json");
  return rep.pass;
}

// ---------------------------------------------------------------------------

bool run_compare_ns(const Config& cfg, const fs::path& dir,
                    std::vector<std::string>& artifacts) {
  FluidParams coupled = cfg.params;
  coupled.poisson = true;
  FluidParams plain = cfg.params;
  plain.poisson = false;

  EvolveOptions opts;
  opts.window = cfg.compare_ns.window;
  const InitialData init = InitialData::canonical();

  const std::vector<NormRequest> creqs = {
      {Field::density, 2.0, 0}, {Field::momentum, 2.0, 0}, {Field::electric, 2.0, 0}};
  const std::vector<NormRequest> preqs = {{Field::density, 2.0, 0},
                                          {Field::momentum, 2.0, 0}};
  const auto cs = evolve_norm_series(coupled, init, creqs, opts);
  const auto ps = evolve_norm_series(plain, init, preqs, opts);

  auto emit = [&](const char* name, const std::vector<NormSeries>& ser) {
    CsvTable t;
    t.header = {"t"};
    for (const auto& s : ser) t.header.push_back(column_name(s.request));
    for (size_t i = 0; i < ser[0].t.size(); ++i) {
      std::vector<double> row = {ser[0].t[i]};
      for (const auto& s : ser) row.push_back(s.value[i]);
      t.add_numeric_row(row);
    }
    write_csv(dir / name, t);
    artifacts.push_back(name);
  };
  emit("compare_ns_coupled.csv", cs);
  emit("compare_ns_plain.csv", ps);

  const DecayFit cn = fit_series(coupled, cs[0], opts.window);
  const DecayFit cm = fit_series(coupled, cs[1], opts.window);
  const DecayFit pn = fit_series(plain, ps[0], opts.window);
  const DecayFit pm = fit_series(plain, ps[1], opts.window);

  bool pass = true;
  json rep;
  rep["kind"] = "compare-ns";
  json fits = json::array();
  for (const auto& [label, fit] :
       {std::pair<const char*, const DecayFit*>{"coupled_n", &cn},
        {"coupled_m", &cm},
        {"plain_n", &pn},
        {"plain_m", &pm}}) {
    json fj = fit_entry(label, 2.0, 0, *fit, 0.05);
    fits.push_back(fj);
    pass = pass && std::abs(fit->exponent - fit->target) <= 0.05;
  }
  rep["fits"] = fits;
  rep["separation"] = pm.exponent - cm.exponent;
  rep["separation_target"] = -0.5;
  rep["pass"] = pass;
  write_json(dir / "compare_ns_report.json", rep);
  artifacts.push_back("compare_ns_report.json");
  return pass;
}

// ---------------------------------------------------------------------------

bool run_kernel_lp(const Config& cfg, const fs::path& dir,
                   std::vector<std::string>& artifacts) {
  const FluidParams& p = cfg.params;
  const auto& k = cfg.kernel_lp;

  std::vector<KernelPiece> pieces = {KernelPiece::density_from_density,
                                     KernelPiece::density_from_momentum,
                                     KernelPiece::momentum_block};
  if (p.poisson) {
    pieces.push_back(KernelPiece::momentum_from_poisson);
    pieces.push_back(KernelPiece::electric_from_density);
    pieces.push_back(KernelPiece::electric_from_momentum);
  }

  EvolveOptions opts;
  opts.window = k.window;

  CsvTable table;
  table.header = {"piece", "a", "p", "alpha", "slope", "stderr", "target"};
  bool pass = true;
  json fits = json::array();
  for (KernelPiece piece : pieces)
    for (double lp : k.lp)
      for (int alpha : k.alpha) {
        const DecayFit f = spectral_kernel_lq_slope(p, piece, lp, alpha, k.r_cut, opts);
        std::vector<std::string> row;
        row.push_back(kernel_piece_name(piece));
        row.push_back(format_g17(kernel_piece_power(piece)));
        row.push_back(format_g17(lp));
        row.push_back(format_g17(alpha));
        row.push_back(format_g17(f.exponent));
        row.push_back(format_g17(f.stderr_));
        row.push_back(format_g17(f.target));
        table.rows.push_back(row);
        json fj = fit_entry(kernel_piece_name(piece), lp, 0, f, 0.05);
        fj["alpha"] = alpha;
        fj["a"] = kernel_piece_power(piece);
        fits.push_back(fj);
        pass = pass && std::abs(f.exponent - f.target) <= 0.05;
      }
  write_csv(dir / "kernel_lp.csv", table);
  artifacts.push_back("kernel_lp.csv");

  json rep;
  rep["kind"] = "kernel-lp";
  rep["r_cut"] = k.r_cut;
  rep["fits"] = fits;
  rep["pass"] = pass;
  write_json(dir / "kernel_lp_report.json", rep);
  artifacts.push_back("kernel_lp_report.json");
  return pass;
}

// ---------------------------------------------------------------------------

bool run_simulate(const Config& cfg, const RunOptions& ro, const fs::path& dir,
                  std::vector<std::string>& artifacts) {
  const auto& s = cfg.simulate;
  const std::uint64_t seed = ro.has_seed ? ro.seed : s.seed;
  const SimState init = s.initial == "trig" ? trig_initial(s.grid, s.eps)
                                            : seeded_initial(s.grid, s.eps, seed);
  const SimResult res = run_simulation(s.grid, cfg.params, s.stepper, init);

  CsvTable table;
  table.header = {"t",    "norm_n_l2", "norm_m_l2", "norm_e_l2",
                  "energy", "mass",      "symmetry",  "min_density"};
  for (const auto& row : res.series)
    table.add_numeric_row({row.t, row.n_l2, row.m_l2, row.e_l2, row.energy, row.mass,
                           row.symmetry, row.min_density});
  write_csv(dir / "simulate_series.csv", table);
  artifacts.push_back("simulate_series.csv");

  if (s.write_final_grid) {
    GridFile g;
    const std::uint64_t n = static_cast<std::uint64_t>(s.grid.n);
    g.dims = {n, n, n};
    g.data = res.final_state.n_hat;
    write_grid_file(dir / "final_n_hat.grid", g);
    artifacts.push_back("final_n_hat.grid");
  }

  double mass_max = 0.0, sym_max = 0.0, dens_min = 1.0;
  bool energy_ok = true;
  for (size_t i = 0; i < res.series.size(); ++i) {
    mass_max = std::max(mass_max, res.series[i].mass);
    sym_max = std::max(sym_max, res.series[i].symmetry);
    dens_min = std::min(dens_min, res.series[i].min_density);
    if (i > 0 && res.series[i].energy > res.series[i - 1].energy * (1.0 + 1e-6))
      energy_ok = false;
  }
  const bool pass = mass_max <= 1e-12 && sym_max <= 1e-12 && energy_ok &&
                    dens_min > s.stepper.vacuum_floor;

  json rep;
  rep["kind"] = "simulate";
  rep["n"] = s.grid.n;
  rep["box"] = s.grid.box;
  rep["dt"] = s.stepper.dt;
  rep["t_end"] = s.stepper.t_end;
  rep["scheme"] = s.stepper.scheme;
  rep["initial"] = s.initial;
  rep["eps"] = s.eps;
  if (s.initial == "seeded") rep["seed"] = seed;
  rep["steps"] = res.steps;
  rep["mass_defect_max"] = mass_max;
  rep["mass_defect_pass"] = mass_max <= 1e-12;
  rep["symmetry_defect_max"] = sym_max;
  rep["symmetry_defect_pass"] = sym_max <= 1e-12;
  rep["energy_nonincreasing_pass"] = energy_ok;
  rep["min_density"] = dens_min;
  rep["final_n_l2"] = res.series.back().n_l2;
  rep["final_m_l2"] = res.series.back().m_l2;
  rep["pass"] = pass;
  write_json(dir / "simulate_report.json", rep);
  artifacts.push_back("simulate_report.json");
  return pass;
}

}  // namespace

// ---------------------------------------------------------------------------

std::filesystem::path resolve_out_dir(const Config& cfg, const RunOptions& opts) {
  if (const char* env = std::getenv("NSPLAB_OUT"); env && *env) return env;
  if (!opts.cli_out.empty()) return opts.cli_out;
  return cfg.output_dir;
}

int run_experiment(const Config& cfg, const RunOptions& opts) {
  const fs::path dir = resolve_out_dir(cfg, opts);
  fs::create_directories(dir);

  RunManifest man;
  man.kind = kind_name(cfg.kind);
  man.config_hash = hash_hex(cfg.hash);
  man.run_id = timestamp_utc() + "-" + man.config_hash.substr(0, 12);
  man.config_echo = cfg.echo;

  const auto start = std::chrono::steady_clock::now();
  try {
    switch (cfg.kind) {
      case ExperimentKind::eigen: man.ok = run_eigen(cfg, dir, man.artifacts); break;
      case ExperimentKind::green_check:
        man.ok = run_green_check(cfg, dir, man.artifacts);
        break;
      case ExperimentKind::decay: man.ok = run_decay(cfg, dir, man.artifacts); break;
      case ExperimentKind::lower_bound:
        man.ok = run_lower_bound(cfg, dir, man.artifacts);
        break;
      case ExperimentKind::compare_ns:
        man.ok = run_compare_ns(cfg, dir, man.artifacts);
        break;
      case ExperimentKind::kernel_lp:
        man.ok = run_kernel_lp(cfg, dir, man.artifacts);
        break;
      case ExperimentKind::simulate:
        man.ok = run_simulate(cfg, opts, dir, man.artifacts);
        break;
    }
    if (!man.ok) man.error = "invariant checks failed; see the report artifact";
  } catch (const std::exception& ex) {
    man.ok = false;
    man.error = ex.what();
    for (const auto& a : man.artifacts) {
      std::error_code ec;
      fs::remove(dir / a, ec);
    }
    man.artifacts.clear();
  }
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(dir / "manifest.json", man);
  return man.ok ? 0 : 1;
}

}  // namespace nsplab
