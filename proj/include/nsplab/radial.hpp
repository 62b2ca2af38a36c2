#pragma once

// Radial spectral profiles and the transforms between spectral and physical
// space under the unitary convention fhat(xi) = (2pi)^{-3/2} int f e^{-i xi.x}.
//
// For a radial scalar profile fhat(r):
//   f(s)        = sqrt(2/pi) int_0^inf fhat(r) j0(r s) r^2 dr
//   ||D^k f||_2 = (4 pi int_0^inf r^{2k} |fhat|^2 r^2 dr)^{1/2}
//
// A longitudinal vector mode mhat(xi) = -i xi g(|xi|) inverts to the purely
// radial field m(x) = xhat h(|x|) with
//   h(s) = sqrt(2/pi) int_0^inf g(r) j1(r s) r^3 dr.

#include "nsplab/quadrature.hpp"
#include "nsplab/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace nsplab {

// amplitude * r^power * exp(-alpha r^2); sums of these cover every
// closed-form profile used in the experiments.
struct GaussianTerm {
  double amplitude = 1.0;
  int power = 0;
  double alpha = 1.0;
};

struct RadialProfile {
  std::vector<GaussianTerm> closed_form;  // preferred when non-empty
  std::vector<double> nodes;              // strictly increasing samples
  std::vector<double> values;
  double floor_c0 = 0.0;   // certified lower bound on [0, floor_radius]
  double floor_radius = 0.0;

  double eval(double r) const;
  void validate() const;  // node ordering, closed-form/sample agreement, floor
  static RadialProfile gaussian(double amplitude, double alpha) {
    RadialProfile p;
    p.closed_form.push_back({amplitude, 0, alpha});
    return p;
  }
};

// Spherical Bessel kernels, stable near x = 0.
double sph_j0(double x);
double sph_j1(double x);

// (4 pi int r^{2k} fhat(r)^2 r^2 dr)^{1/2}; k >= -1 (k = -1 is the electric
// shortcut: the 1/r^2 cancels the volume factor).
double spectral_l2_norm(const std::function<double(double)>& fhat, int k,
                        const QuadratureSpec& spec, double time_scale = 0.0);
double spectral_l2_norm(const RadialProfile& profile, int k, const QuadratureSpec& spec);

double inverse_radial_scalar(const std::function<double(double)>& fhat, double s,
                             const QuadratureSpec& spec, double time_scale = 0.0);
double inverse_radial_scalar(const RadialProfile& profile, double s, const QuadratureSpec& spec);

double inverse_radial_longitudinal(const std::function<double(double)>& g, double s,
                                   const QuadratureSpec& spec, double time_scale = 0.0);
double inverse_radial_longitudinal(const RadialProfile& profile, double s,
                                   const QuadratureSpec& spec);

// L^p norm of a radial physical field given pointwise |field|(s).
// p = infinity: max over the s grid plus parabolic refinement at the peak.
// finite p: (4 pi int |field|^p s^2 ds)^{1/p} on [0, s_max].
// Both variants double the resolution once and require the result to move
// by less than 0.1%, else they throw.
double physical_lp_norm(const std::function<double(double)>& field_abs, double p,
                        double s_max, int s_points = 256);

}  // namespace nsplab
