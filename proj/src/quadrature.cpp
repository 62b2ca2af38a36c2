#include "nsplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace nsplab {

const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
  if (n < 2 || n > 64) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Newton iteration from the Chebyshev-like initial guess; standard and
  // fully deterministic.
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule[n - 1 - i] = {x, 2.0 / ((1.0 - x * x) * pp * pp)};
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double pairwise_sum(std::vector<double> v) {
  if (v.empty()) return 0.0;
  size_t n = v.size();
  while (n > 1) {
    const size_t half = n / 2;
    for (size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n % 2) {
      v[half] = v[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return v[0];
}

namespace {

RadialIntegral run_panels(const std::function<double(double)>& f,
                          const QuadratureSpec& spec, double osc_scale,
                          double time_scale, int panels) {
  const auto& rule = gauss_legendre(spec.points_per_panel);

  // Panel width: uniform over the layout window, capped by the oscillation
  // period.  With time scaling the window lives in zeta = r sqrt(1+t).
  const double stretch = spec.scale_by_time ? std::sqrt(1.0 + std::max(time_scale, 0.0)) : 1.0;
  const double window = std::min(spec.r_max * stretch, spec.scale_by_time ? 40.0 : spec.r_max);
  double width = window / panels / stretch;  // width in r
  if (osc_scale > 0.0) width = std::min(width, 3.14159265358979323846 / osc_scale);

  RadialIntegral out;
  std::vector<double> contributions;
  double running = 0.0;
  int quiet = 0;
  double a = 0.0;
  while (a < spec.r_max) {
    const double b = std::min(a + width, spec.r_max);
    std::vector<double> vals(rule.size());
    const double half = 0.5 * (b - a), midp = 0.5 * (a + b);
    double fmax = 0.0;
    for (size_t i = 0; i < rule.size(); ++i) {
      const double fv = f(midp + half * rule[i].first);
      fmax = std::max(fmax, std::abs(fv));
      vals[i] = rule[i].second * fv;
    }
    const double panel = half * pairwise_sum(std::move(vals));
    contributions.push_back(panel);
    running += std::abs(panel);
    a = b;
    // A panel only counts as negligible if mass has been seen already and
    // the integrand itself is small enough that even the whole remaining
    // interval cannot matter; a cancelling oscillation, or a profile whose
    // support starts away from the origin, must keep marching outward.  The
    // stop floor sits two orders below the certification tolerance so the
    // tail certificate passes with margin.
    const double floor_ = 0.01 * spec.tail_rel_tol * running;
    if (running > 0.0 && std::abs(panel) < floor_ &&
        fmax * (spec.r_max - a + width) < floor_) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  out.r_stop = a;
  out.abs_scale = running;
  out.value = pairwise_sum(std::move(contributions));

  // Tail certificate: probe the integrand at a few points past r_stop and
  // bound the remainder by the largest sample times the remaining width.
  const double rest = spec.r_max - out.r_stop;
  if (rest <= 0.0) {
    double probe = std::abs(f(spec.r_max));
    out.tail_bound = probe * std::max(width, 1e-300);
  } else {
    double probe = 0.0;
    for (int i = 0; i < 5; ++i)
      probe = std::max(probe, std::abs(f(out.r_stop + rest * (0.05 + 0.225 * i))));
    out.tail_bound = probe * rest;
  }
  // Certify against the accumulated mass, not the cancelled value: the
  // quadrature's own round-off already sits at eps * abs_scale, so a
  // relative-to-value certificate would be vacuous for oscillatory
  // integrals whose result is exponentially smaller than the integrand.
  out.certified =
      out.tail_bound <= spec.tail_rel_tol * std::max(out.abs_scale, 1e-300) ||
      out.tail_bound < 1e-280;
  return out;
}

}  // namespace

RadialIntegral integrate_radial(const std::function<double(double)>& f,
                                const QuadratureSpec& spec, double osc_scale,
                                double time_scale) {
  if (!(spec.r_max > 0.0) || spec.panels < 1 || spec.points_per_panel < 2)
    throw std::invalid_argument("integrate_radial: bad quadrature spec");
  return run_panels(f, spec, osc_scale, time_scale, spec.panels);
}

double integrate_radial_checked(const std::function<double(double)>& f,
                                const QuadratureSpec& spec, double osc_scale,
                                double time_scale) {
  RadialIntegral r = integrate_radial(f, spec, osc_scale, time_scale);
  for (int boost = 2; !r.certified && boost <= 8; boost *= 2) {
    QuadratureSpec wide = spec;
    wide.panels = spec.panels * boost;
    r = integrate_radial(f, wide, osc_scale, time_scale);
  }
  if (!r.certified)
    throw std::runtime_error("integrate_radial: truncation certificate failed at r_max");
  return r.value;
}

}  // namespace nsplab
