#pragma once

// Composite Gauss-Legendre quadrature on [0, r_max] with a truncation
// certificate.  Panels are laid out uniformly either in r or, for
// late-time integrands that concentrate near the origin, in the scaled
// variable zeta = r * sqrt(1 + t) (equivalent to the substitution, panel by
// panel).  When the integrand oscillates like j0(r s) the panel width is
// additionally capped by one oscillation period so a 12-point rule stays
// at round-off accuracy.
//
// The accumulation runs outward from 0 and, once some mass has been seen,
// stops after three consecutive panels that contribute less than
// tail_rel_tol of the running total; the returned certificate bounds the
// abandoned tail by probing the integrand beyond the stopping radius and
// compares it against the accumulated |panel| mass (the scale at which the
// quadrature itself operates; a cancelled value can sit far below it).
// Panel sums are combined pairwise in a fixed order, so results are
// bit-reproducible.

#include <functional>
#include <stdexcept>
#include <vector>

namespace nsplab {

struct QuadratureSpec {
  int points_per_panel = 12;
  int panels = 64;           // base panel count over the layout window
  double r_max = 20.0;       // hard outer truncation radius
  bool scale_by_time = false;
  double tail_rel_tol = 1e-14;
};

struct RadialIntegral {
  double value = 0.0;
  double tail_bound = 0.0;  // estimate of |integral beyond r_stop|
  double abs_scale = 0.0;   // sum of |panel| contributions
  double r_stop = 0.0;
  bool certified = false;
};

// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

// Integrate f over [0, spec.r_max].  osc_scale: dominant oscillation
// wavenumber in r (0 for smooth integrands); time_scale: the t entering the
// zeta substitution when spec.scale_by_time is set.
RadialIntegral integrate_radial(const std::function<double(double)>& f,
                                const QuadratureSpec& spec,
                                double osc_scale = 0.0,
                                double time_scale = 0.0);

// Same, but throws std::runtime_error if the certificate fails after the
// internal panel-count escalation.
double integrate_radial_checked(const std::function<double(double)>& f,
                                const QuadratureSpec& spec,
                                double osc_scale = 0.0,
                                double time_scale = 0.0);

// Fixed-order pairwise reduction (used for every norm-like sum).
double pairwise_sum(std::vector<double> v);

}  // namespace nsplab
