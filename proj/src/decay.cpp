#include "nsplab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsplab {

namespace {

struct Ols {
  double slope, intercept, stderr_slope;
  int n;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: degenerate abscissae");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  const double var = n > 2 ? ss_res / (n - 2) : 0.0;
  return {slope, intercept, std::sqrt(var / sxx), n};
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value,
                   const FitWindow& window, double target) {
  if (t.size() != value.size()) throw std::invalid_argument("fit_decay: size mismatch");
  std::vector<double> x, y;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_min || t[i] > window.t_max) continue;
    if (!(value[i] > 0.0) || !std::isfinite(value[i]))
      throw std::invalid_argument("fit_decay: norms must be positive and finite");
    x.push_back(std::log1p(t[i]));
    y.push_back(std::log(value[i]));
  }
  if (x.size() < 12)
    throw std::invalid_argument("fit_decay: need at least 12 samples inside the window");
  const Ols f = ols(x, y);
  DecayFit out;
  out.exponent = f.slope;
  out.stderr_ = f.stderr_slope;
  out.target = target;
  out.n_points = f.n;
  out.window = window;
  return out;
}

double expected_exponent(const FluidParams& p, Field field, double lp, int k) {
  const double base = -1.5 * (1.0 - 1.0 / lp) - 0.5 * k;
  if (field == Field::density) return base;
  return base + (p.poisson ? 0.5 : 0.0);
}

namespace {

// Exact per-mode evolution of a radial workload.
struct Evolved {
  const FluidParams& p;
  const InitialData& init;

  // (nhat, u) at one point; u is the longitudinal momentum amplitude,
  // mhat = -i xihat u.
  std::pair<double, double> at(double r, double t) const {
    const ModeScalars s = mode_scalars(p, r, t);
    const double n0 = init.n0.eval(r);
    const double u0 = init.u0.eval(r);
    const double press_r = p.sound_speed * p.sound_speed * r + p.coupling() / r;
    const double nh = s.g_nn * n0 - r * s.d_quot * u0;
    const double uh = s.h_long * u0 + press_r * s.d_quot * n0;
    return {nh, uh};
  }
};

double s_max_for(const FluidParams& p, double t) {
  const double c2 = p.sound_speed * p.sound_speed;
  if (p.poisson) {
    // Dispersive packet: group speed ~ lam c^2 r, spectral reach
    // r ~ sqrt(40 / (theta t)).
    return 8.0 + p.debye * c2 * std::sqrt(40.0 * std::max(t, 1.0) / p.theta_half());
  }
  return 8.0 + 1.2 * p.sound_speed * std::max(t, 1.0);
}

double norm_at(const FluidParams& p, const InitialData& init, const NormRequest& req,
               double t, const EvolveOptions& opts) {
  const Evolved ev{p, init};
  if (req.field == Field::electric && !p.poisson)
    throw std::invalid_argument("norm_at: no electric field with the coupling off");
  const bool has_transverse = !init.v0.closed_form.empty() || !init.v0.nodes.empty();

  if (req.p == 2.0) {
    int weight = req.k;
    std::function<double(double)> profile;
    switch (req.field) {
      case Field::density:
        profile = [&, t](double r) { return ev.at(r, t).first; };
        break;
      case Field::momentum:
        profile = [&, t](double r) { return ev.at(r, t).second; };
        break;
      case Field::electric:
        profile = [&, t](double r) { return ev.at(r, t).first; };
        weight = req.k - 1;
        break;
    }
    const double v = spectral_l2_norm(profile, weight, opts.quad, t);
    if (req.field == Field::momentum && has_transverse) {
      // The transverse part rides along as e^{-mu r^2 t} v0 and is
      // pointwise orthogonal to the longitudinal part, so the squared
      // norms add.
      const double mu = p.mu;
      const double w = spectral_l2_norm(
          [&, t](double r) { return std::exp(-mu * r * r * t) * init.v0.eval(r); },
          weight, opts.quad, t);
      return std::hypot(v, w);
    }
    return v;
  }

  if (req.field == Field::momentum && has_transverse)
    throw std::invalid_argument("norm_at: transverse initial data supports p = 2 only");
  if (req.k != 0)
    throw std::invalid_argument("norm_at: derivative weights are supported for p = 2 only");
  if (!(req.p > 2.0))
    throw std::invalid_argument("norm_at: p must be 2, in (2, inf), or inf");

  std::function<double(double)> field_abs;
  switch (req.field) {
    case Field::density:
      field_abs = [&, t](double s) {
        return std::abs(inverse_radial_scalar(
            [&, t](double r) { return ev.at(r, t).first; }, s, opts.quad, t));
      };
      break;
    case Field::momentum:
      field_abs = [&, t](double s) {
        return std::abs(inverse_radial_longitudinal(
            [&, t](double r) { return ev.at(r, t).second / r; }, s, opts.quad, t));
      };
      break;
    case Field::electric:
      field_abs = [&, t](double s) {
        return std::abs(inverse_radial_longitudinal(
            [&, t](double r) { return ev.at(r, t).first / (r * r); }, s, opts.quad, t));
      };
      break;
  }
  return physical_lp_norm(field_abs, req.p, s_max_for(p, t), opts.linf_samples);
}

std::vector<double> geometric_grid(const FitWindow& w, int per_decade_pair) {
  const double decades = std::log10(w.t_max / w.t_min);
  const int n = std::max(12, static_cast<int>(std::lround(per_decade_pair * decades / 2.0)));
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i)
    t[i] = w.t_min * std::pow(w.t_max / w.t_min, static_cast<double>(i) / (n - 1));
  return t;
}

}  // namespace

std::vector<NormSeries> evolve_norm_series(const FluidParams& p, const InitialData& init,
                                           const std::vector<NormRequest>& requests,
                                           const EvolveOptions& opts) {
  p.validate();
  init.n0.validate();
  init.u0.validate();
  init.v0.validate();
  const std::vector<double> grid = geometric_grid(opts.window, opts.points_per_decade_pair);
  const bool average = opts.period_average && p.poisson;
  const double period = p.debye * kPi;
  const auto& block_rule = gauss_legendre(opts.block_points);

  std::vector<NormSeries> out;
  out.reserve(requests.size());
  for (const NormRequest& req : requests) {
    NormSeries series;
    series.request = req;
    series.t.reserve(grid.size());
    series.value.reserve(grid.size());
    for (double t0 : grid) {
      if (average) {
        std::vector<double> samples(block_rule.size());
        for (size_t i = 0; i < block_rule.size(); ++i) {
          const double s = t0 + 0.5 * period * (1.0 + block_rule[i].first);
          samples[i] = 0.5 * block_rule[i].second * norm_at(p, init, req, s, opts);
        }
        series.t.push_back(t0 + 0.5 * period);
        series.value.push_back(pairwise_sum(std::move(samples)));
      } else {
        series.t.push_back(t0);
        series.value.push_back(norm_at(p, init, req, t0, opts));
      }
    }
    out.push_back(std::move(series));
  }
  return out;
}

DecayFit fit_series(const FluidParams& p, const NormSeries& series, const FitWindow& window) {
  const double target = expected_exponent(p, series.request.field, series.request.p,
                                          series.request.k);
  return fit_decay(series.t, series.value, window, target);
}

double F_of_t(const FluidParams& p, double t, double R, const QuadratureSpec& spec) {
  p.validate();
  if (!(R > 0.0)) throw std::invalid_argument("F_of_t: R must be > 0");
  const double c2 = p.sound_speed * p.sound_speed;
  const double tf = p.theta_full();
  auto integrand = [&](double r) {
    const double phase = t / p.debye + 0.5 * p.debye * c2 * r * r;
    const double s = std::sin(phase);
    return std::exp(-tf * r * r) * s * s;
  };
  QuadratureSpec local = spec;
  local.r_max = R;
  local.scale_by_time = false;
  return integrate_radial_checked(integrand, local, 2.0 * p.debye * c2 * R);
}

LowerBoundReport verify_lower_bound(const FluidParams& p, const InitialData& init,
                                    double R, const FitWindow& band_window,
                                    const QuadratureSpec& spec) {
  p.validate();
  init.n0.validate();
  if (!p.poisson)
    throw std::invalid_argument("verify_lower_bound: needs the electrostatic coupling");

  LowerBoundReport rep;
  rep.R = R;
  const double c = p.sound_speed;
  const double lam = p.debye;
  const double r_required = std::sqrt(7.0 * kPi) / (c * std::sqrt(lam));
  rep.precondition_ok = R > r_required && init.n0.floor_c0 > 0.0;
  if (!rep.precondition_ok) return rep;

  rep.f_min_analytic = (std::sqrt(3.0 * kPi) - std::sqrt(2.0 * kPi)) / (2.0 * c * std::sqrt(lam)) *
                       std::exp(-7.0 * kPi * p.theta_full() / (4.0 * c * c * lam)) *
                       std::pow(std::sin(kPi / 8.0), 2);

  const double period = lam * kPi;
  constexpr int kSamples = 400;
  rep.f_min_numeric = std::numeric_limits<double>::infinity();
  rep.f_max_numeric = 0.0;
  rep.periodicity_defect = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double t = period * i / kSamples;
    const double f0 = F_of_t(p, t, R, spec);
    const double f1 = F_of_t(p, t + period, R, spec);
    rep.f_min_numeric = std::min(rep.f_min_numeric, f0);
    rep.f_max_numeric = std::max(rep.f_max_numeric, f0);
    rep.periodicity_defect = std::max(rep.periodicity_defect, std::abs(f1 - f0));
  }

  // Raw (unaveraged) momentum norm band over the window.
  EvolveOptions opts;
  opts.window = band_window;
  opts.points_per_decade_pair = 400;
  opts.period_average = false;
  opts.quad = spec;
  opts.quad.scale_by_time = true;
  const auto series = evolve_norm_series(p, init, {{Field::momentum, 2.0, 0}}, opts);
  rep.band_min = std::numeric_limits<double>::infinity();
  rep.band_max = 0.0;
  for (size_t i = 0; i < series[0].t.size(); ++i) {
    const double v = series[0].value[i] * std::pow(1.0 + series[0].t[i], 0.25);
    rep.band_min = std::min(rep.band_min, v);
    rep.band_max = std::max(rep.band_max, v);
  }

  rep.pass = rep.periodicity_defect <= 1e-8 && rep.f_min_numeric >= rep.f_min_analytic &&
             rep.band_min > 0.0 && rep.band_max / rep.band_min <= 1e2;
  return rep;
}

ContrastReport compare_ns(const FluidParams& base, const InitialData& init,
                          const EvolveOptions& opts) {
  FluidParams coupled = base;
  coupled.poisson = true;
  FluidParams plain = base;
  plain.poisson = false;

  const std::vector<NormRequest> reqs = {{Field::momentum, 2.0, 0}, {Field::density, 2.0, 0}};
  const auto cs = evolve_norm_series(coupled, init, reqs, opts);
  const auto ps = evolve_norm_series(plain, init, reqs, opts);

  ContrastReport rep;
  rep.coupled_m = fit_series(coupled, cs[0], opts.window);
  rep.coupled_n = fit_series(coupled, cs[1], opts.window);
  rep.plain_m = fit_series(plain, ps[0], opts.window);
  rep.plain_n = fit_series(plain, ps[1], opts.window);
  rep.separation = rep.plain_m.exponent - rep.coupled_m.exponent;
  return rep;
}

double kernel_piece_magnitude(const FluidParams& p, KernelPiece piece, double r, double t) {
  const ModeScalars s = mode_scalars(p, r, t);
  const double c2 = p.sound_speed * p.sound_speed;
  switch (piece) {
    case KernelPiece::density_from_density:
      return std::abs(s.g_nn);
    case KernelPiece::density_from_momentum:
      return r * std::abs(s.d_quot);
    case KernelPiece::momentum_block: {
      const double col = c2 * r * s.d_quot;
      return std::sqrt(col * col + 2.0 * s.e_transverse * s.e_transverse +
                       s.h_long * s.h_long);
    }
    case KernelPiece::momentum_from_poisson:
      if (!p.poisson)
        throw std::invalid_argument("kernel_piece_magnitude: poisson piece needs the coupling");
      return p.coupling() * std::abs(s.d_quot) / r;
    case KernelPiece::electric_from_density:
      return std::abs(s.g_nn) / r;
    case KernelPiece::electric_from_momentum:
      return std::abs(s.d_quot);
  }
  throw std::logic_error("kernel_piece_magnitude: unknown piece");
}

int kernel_piece_power(KernelPiece piece) {
  switch (piece) {
    case KernelPiece::density_from_density: return 0;
    case KernelPiece::density_from_momentum: return 1;
    case KernelPiece::momentum_block: return 0;
    case KernelPiece::momentum_from_poisson: return -1;
    case KernelPiece::electric_from_density: return -1;
    case KernelPiece::electric_from_momentum: return 0;
  }
  throw std::logic_error("kernel_piece_power: unknown piece");
}

std::string kernel_piece_name(KernelPiece piece) {
  switch (piece) {
    case KernelPiece::density_from_density: return "density_from_density";
    case KernelPiece::density_from_momentum: return "density_from_momentum";
    case KernelPiece::momentum_block: return "momentum_block";
    case KernelPiece::momentum_from_poisson: return "momentum_from_poisson";
    case KernelPiece::electric_from_density: return "electric_from_density";
    case KernelPiece::electric_from_momentum: return "electric_from_momentum";
  }
  throw std::logic_error("kernel_piece_name: unknown piece");
}

DecayFit spectral_kernel_lq_slope(const FluidParams& p, KernelPiece piece, double lp,
                                  int alpha, double r_cut, const EvolveOptions& opts) {
  p.validate();
  if (!(lp >= 2.0)) throw std::invalid_argument("spectral_kernel_lq_slope: p must be in [2, inf]");
  const double q = std::isinf(lp) ? 1.0 : lp / (lp - 1.0);

  auto lq_norm = [&](double t) {
    QuadratureSpec spec = opts.quad;
    spec.r_max = r_cut + 1.0;
    spec.scale_by_time = true;
    auto integrand = [&](double r) {
      const double m = chi_cutoff(r, r_cut) * std::pow(r, alpha) *
                       kernel_piece_magnitude(p, piece, r, t);
      return 4.0 * kPi * std::pow(m, q) * r * r;
    };
    return std::pow(integrate_radial_checked(integrand, spec, 0.0, t), 1.0 / q);
  };

  const std::vector<double> grid = geometric_grid(opts.window, opts.points_per_decade_pair);
  const bool average = opts.period_average && p.poisson;
  const double period = p.debye * kPi;
  const auto& rule = gauss_legendre(opts.block_points);

  std::vector<double> t_out, v_out;
  for (double t0 : grid) {
    if (average) {
      std::vector<double> samples(rule.size());
      for (size_t i = 0; i < rule.size(); ++i) {
        const double s = t0 + 0.5 * period * (1.0 + rule[i].first);
        samples[i] = 0.5 * rule[i].second * lq_norm(s);
      }
      t_out.push_back(t0 + 0.5 * period);
      v_out.push_back(pairwise_sum(std::move(samples)));
    } else {
      t_out.push_back(t0);
      v_out.push_back(lq_norm(t0));
    }
  }

  const double target = -1.5 * (1.0 - 1.0 / lp) - 0.5 * alpha - 0.5 * kernel_piece_power(piece);
  return fit_decay(t_out, v_out, opts.window, target);
}

}  // namespace nsplab
