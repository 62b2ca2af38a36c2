#include "nsplab/radial.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsplab {

double sph_j0(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double sph_j1(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0));
  }
  return (std::sin(x) / x - std::cos(x)) / x;
}

double RadialProfile::eval(double r) const {
  if (!closed_form.empty()) {
    double v = 0.0;
    for (const auto& term : closed_form)
      v += term.amplitude * std::pow(r, term.power) * std::exp(-term.alpha * r * r);
    return v;
  }
  if (nodes.empty()) return 0.0;
  // Linear interpolation on the samples, constant extrapolation to 0 outside.
  if (r <= nodes.front()) return values.front();
  if (r >= nodes.back()) return 0.0;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  const size_t hi = static_cast<size_t>(it - nodes.begin());
  const double w = (r - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]);
  return values[hi - 1] * (1.0 - w) + values[hi] * w;
}

void RadialProfile::validate() const {
  if (nodes.size() != values.size())
    throw std::invalid_argument("RadialProfile: nodes/values size mismatch");
  for (size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("RadialProfile: nodes must be strictly increasing");
  if (!closed_form.empty()) {
    for (size_t i = 0; i < nodes.size(); ++i) {
      double v = 0.0;
      for (const auto& term : closed_form)
        v += term.amplitude * std::pow(nodes[i], term.power) * std::exp(-term.alpha * nodes[i] * nodes[i]);
      if (std::abs(v - values[i]) > 1e-12 * std::max(1.0, std::abs(v)))
        throw std::invalid_argument("RadialProfile: samples disagree with closed form");
    }
  }
  if (floor_c0 > 0.0) {
    if (!(floor_radius > 0.0))
      throw std::invalid_argument("RadialProfile: floor certificate needs a radius");
    for (int i = 0; i <= 256; ++i) {
      const double r = floor_radius * i / 256.0;
      if (eval(r) < floor_c0)
        throw std::invalid_argument("RadialProfile: floor certificate violated");
    }
  }
}

double spectral_l2_norm(const std::function<double(double)>& fhat, int k,
                        const QuadratureSpec& spec, double time_scale) {
  if (k < -1) throw std::invalid_argument("spectral_l2_norm: weight power must be >= -1");
  auto integrand = [&](double r) {
    const double v = fhat(r);
    return 4.0 * kPi * std::pow(r, 2 * k + 2) * v * v;
  };
  const double val = integrate_radial_checked(integrand, spec, 0.0, time_scale);
  return std::sqrt(std::max(val, 0.0));
}

double spectral_l2_norm(const RadialProfile& profile, int k, const QuadratureSpec& spec) {
  return spectral_l2_norm([&](double r) { return profile.eval(r); }, k, spec);
}

double inverse_radial_scalar(const std::function<double(double)>& fhat, double s,
                             const QuadratureSpec& spec, double time_scale) {
  if (!(s >= 0.0)) throw std::invalid_argument("inverse_radial_scalar: s must be >= 0");
  auto integrand = [&](double r) { return fhat(r) * sph_j0(r * s) * r * r; };
  const double v = integrate_radial_checked(integrand, spec, s, time_scale);
  return std::sqrt(2.0 / kPi) * v;
}

double inverse_radial_scalar(const RadialProfile& profile, double s, const QuadratureSpec& spec) {
  return inverse_radial_scalar([&](double r) { return profile.eval(r); }, s, spec);
}

double inverse_radial_longitudinal(const std::function<double(double)>& g, double s,
                                   const QuadratureSpec& spec, double time_scale) {
  if (!(s >= 0.0)) throw std::invalid_argument("inverse_radial_longitudinal: s must be >= 0");
  auto integrand = [&](double r) { return g(r) * sph_j1(r * s) * r * r * r; };
  const double v = integrate_radial_checked(integrand, spec, s, time_scale);
  return std::sqrt(2.0 / kPi) * v;
}

double inverse_radial_longitudinal(const RadialProfile& profile, double s,
                                   const QuadratureSpec& spec) {
  return inverse_radial_longitudinal([&](double r) { return profile.eval(r); }, s, spec);
}

namespace {

double lp_once(const std::function<double(double)>& field_abs, double p,
               double s_max, int s_points) {
  if (std::isinf(p)) {
    // Scan, then refine the peak with a 3-point parabola.
    double best = 0.0, best_s = 0.0;
    const double ds = s_max / s_points;
    for (int i = 0; i <= s_points; ++i) {
      const double v = std::abs(field_abs(i * ds));
      if (v > best) {
        best = v;
        best_s = i * ds;
      }
    }
    const double h = 0.5 * ds;
    const double lo = std::max(best_s - h, 0.0), hi = best_s + h;
    const double fl = std::abs(field_abs(lo)), fc = best, fr = std::abs(field_abs(hi));
    const double denom = fl - 2.0 * fc + fr;
    if (denom < 0.0) {
      const double delta = 0.5 * (fl - fr) / denom * h;
      if (std::abs(delta) <= h) {
        const double refined = fc - 0.25 * (fl - fr) * delta / h;
        return std::max(best, refined);
      }
    }
    return best;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("physical_lp_norm: p must be in [1, inf]");
  QuadratureSpec spec;
  spec.panels = s_points / spec.points_per_panel + 1;
  spec.r_max = s_max;
  auto integrand = [&](double s) {
    return 4.0 * kPi * std::pow(std::abs(field_abs(s)), p) * s * s;
  };
  // The field values come from certified transforms already; the outer
  // quadrature is validated by the refinement check instead.
  const RadialIntegral ri = integrate_radial(integrand, spec);
  return std::pow(ri.value, 1.0 / p);
}

}  // namespace

double physical_lp_norm(const std::function<double(double)>& field_abs, double p,
                        double s_max, int s_points) {
  if (!(s_max > 0.0) || s_points < 8)
    throw std::invalid_argument("physical_lp_norm: bad sampling window");
  const double coarse = lp_once(field_abs, p, s_max, s_points);
  const double fine = lp_once(field_abs, p, s_max, 2 * s_points);
  if (std::abs(fine - coarse) > 1e-3 * std::max(std::abs(fine), 1e-300))
    throw std::runtime_error("physical_lp_norm: resolution check failed (grid too coarse)");
  return fine;
}

}  // namespace nsplab
