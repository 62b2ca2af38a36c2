#include "nsplab/green.hpp"

namespace nsplab {

namespace {

// sinh(x)/x for complex x, series below 1e-4 (5 terms reach round-off there).
Complex sinhc(Complex x) {
  if (std::abs(x) < 1e-4) {
    const Complex x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)));
  }
  return std::sinh(x) / x;
}

}  // namespace

ModeScalars mode_scalars(const FluidParams& p, double r, double t) {
  if (!(r > 0.0) || !(t >= 0.0) || !std::isfinite(r) || !std::isfinite(t))
    throw std::invalid_argument("mode_scalars: need r > 0 and t >= 0");

  const EigenTriple eig = eigen_decompose(p, r);
  const double mid = -p.theta_half() * r * r;
  // half_gap = (lam+ - lam-)/2: i*b when oscillatory, real when overdamped.
  const Complex half_gap = 0.5 * (eig.lambda_plus - eig.lambda_minus);

  const double zb = mid * t;
  const Complex dgap = half_gap * t;

  ModeScalars s;
  if (std::abs(dgap.real()) > 30.0) {
    // Deep overdamped regime: cosh(dgap) would overflow while exp(zb)
    // underflows.  The gap is huge, so the plain two-exponential forms
    // have no cancellation; both eigenvalues are real and <= 0.
    const double lp = eig.lambda_plus.real(), lm = eig.lambda_minus.real();
    const double ep = std::exp(lp * t), em = std::exp(lm * t);
    const double gap = lp - lm;
    s.g_nn = (lp * em - lm * ep) / gap;
    s.h_long = (lp * ep - lm * em) / gap;
    s.d_quot = (ep - em) / gap;
  } else {
    const double envelope = std::exp(zb);
    const Complex ch = std::cosh(dgap);
    const Complex sc = sinhc(dgap);
    s.g_nn = envelope * (ch - zb * sc).real();
    s.h_long = envelope * (ch + zb * sc).real();
    s.d_quot = t * envelope * sc.real();
  }
  s.e_transverse = std::exp(-p.mu * r * r * t);
  const double press = p.sound_speed * p.sound_speed + p.coupling() / (r * r);
  s.coupling_mn = -press * s.d_quot;
  return s;
}

Mat4c green_matrix(const FluidParams& p, const Vec3& xi, double t) {
  const double r = xi.norm();
  if (!(r > 0.0)) throw std::invalid_argument("green_matrix: xi = 0 has no mode matrix");
  const ModeScalars s = mode_scalars(p, r, t);
  const Complex i_unit(0.0, 1.0);
  const Vec3 xhat = xi / r;

  Mat4c g = Mat4c::Zero();
  g(0, 0) = s.g_nn;
  for (int j = 0; j < 3; ++j) {
    g(0, 1 + j) = -i_unit * xi[j] * s.d_quot;
    g(1 + j, 0) = i_unit * xi[j] * s.coupling_mn;
    for (int l = 0; l < 3; ++l) {
      const double proj = xhat[j] * xhat[l];
      g(1 + j, 1 + l) = s.e_transverse * ((j == l ? 1.0 : 0.0) - proj) + s.h_long * proj;
    }
  }
  return g;
}

GreenApplied apply_green_mode(const FluidParams& p, const Vec3& xi, double t,
                              Complex n0, const Vec3c& m0) {
  const double r = xi.norm();
  if (!(r > 0.0)) throw std::invalid_argument("apply_green_mode: xi = 0");
  const ModeScalars s = mode_scalars(p, r, t);
  const Complex i_unit(0.0, 1.0);
  const Vec3 xhat = xi / r;

  const Complex mlc = xhat.cast<Complex>().dot(m0);  // conjugates xhat: real, harmless
  const Vec3c mperp = m0 - mlc * xhat.cast<Complex>();

  GreenApplied out;
  out.n = s.g_nn * n0 - i_unit * r * s.d_quot * mlc;
  const Complex mlc_t = i_unit * r * s.coupling_mn * n0 + s.h_long * mlc;
  out.m = mlc_t * xhat.cast<Complex>() + s.e_transverse * mperp;
  out.e = -i_unit / (r * r) * out.n * xi.cast<Complex>();
  return out;
}

double chi_cutoff(double r, double r_cut) {
  if (!(r >= 0.0) || !(r_cut > 0.0))
    throw std::invalid_argument("chi_cutoff: need r >= 0 and r_cut > 0");
  if (r <= r_cut) return 1.0;
  const double s = r - r_cut;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

std::vector<AsymptoticRow> asymptotic_check(const FluidParams& p,
                                            const std::vector<double>& r_grid,
                                            const std::vector<double>& t_grid) {
  p.validate();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<AsymptoticRow> rows;
  rows.reserve(r_grid.size());

  for (double r : r_grid) {
    AsymptoticRow row{};
    row.r = r;
    const EigenTriple eig = eigen_decompose(p, r);

    row.err_lam_plus = std::abs(eig.lambda_plus - lambda_plus_leading(p, r));
    row.err_lam_minus = std::abs(eig.lambda_minus - lambda_minus_leading(p));
    row.err_lam_zero = std::abs(eig.lambda_zero + p.mu * r * r);

    if (eig.regime == SpectralRegime::oscillatory) {
      const double b = 0.5 * std::sqrt(eig.discriminant);
      const double b_quad = oscillation_frequency_quadratic(p, r);
      row.err_b = std::abs(b - b_quad);

      // Low-frequency approximants: same trig form with the expanded
      // frequency substituted for the exact one.
      double eg = 0.0, eh = 0.0, ed = 0.0;
      const double th = p.theta_half() * r * r;
      for (double t : t_grid) {
        const ModeScalars s = mode_scalars(p, r, t);
        const double env = std::exp(-th * t);
        const double snc = std::abs(b_quad * t) < 1e-8 ? t : std::sin(b_quad * t) / b_quad;
        const double g_approx = env * (std::cos(b_quad * t) + th * snc);
        const double h_approx = env * (std::cos(b_quad * t) - th * snc);
        const double d_approx = env * snc;
        eg = std::max(eg, std::abs(s.g_nn - g_approx));
        eh = std::max(eh, std::abs(s.h_long - h_approx));
        ed = std::max(ed, std::abs(s.d_quot - d_approx));
      }
      row.err_g_nn = eg;
      row.err_h_long = eh;
      row.err_d_quot = ed;
    } else {
      row.err_b = nan;
      row.err_g_nn = nan;
      row.err_h_long = nan;
      row.err_d_quot = nan;
    }
    rows.push_back(row);
  }
  return rows;
}

EnvelopeFit high_freq_envelope(const FluidParams& p, double eta,
                               const std::vector<double>& t_grid) {
  p.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("high_freq_envelope: eta must be > 0");

  constexpr int kRadii = 400;
  std::vector<double> radii(kRadii);
  for (int i = 0; i < kRadii; ++i)
    radii[i] = eta * std::pow(10.0, static_cast<double>(i) / (kRadii - 1));

  EnvelopeFit fit;
  fit.t = t_grid;
  fit.sup.reserve(t_grid.size());
  for (double t : t_grid) {
    double sup = 0.0;
    for (double r : radii) {
      const ModeScalars s = mode_scalars(p, r, t);
      sup = std::max({sup, std::abs(s.g_nn), std::abs(s.h_long),
                      std::abs(s.d_quot), s.e_transverse});
    }
    fit.sup.push_back(sup);
  }

  // Least squares log(sup) = log C - R0 t over the strictly positive times.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) continue;
    if (!(fit.sup[i] > 0.0))
      throw std::runtime_error("high_freq_envelope: vanishing envelope sample");
    const double x = t_grid[i], y = std::log(fit.sup[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("high_freq_envelope: need at least 2 positive times");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.rate = -slope;
  fit.log_prefactor = (sy - slope * sx) / n;
  if (!(fit.rate > 0.0))
    throw std::runtime_error("high_freq_envelope: envelope is not decaying");
  return fit;
}

}  // namespace nsplab
