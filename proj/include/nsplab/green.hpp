#pragma once

// Closed-form propagator of one Fourier mode.
//
// With lam_pm the longitudinal eigenvalue pair, the semigroup e^{t A(xi)}
// is assembled from five scalar building blocks:
//
//   g_nn     = (lam+ e^{lam- t} - lam- e^{lam+ t}) / (lam+ - lam-)
//   d_quot   = (e^{lam+ t} - e^{lam- t}) / (lam+ - lam-)
//   h_long   = (lam+ e^{lam+ t} - lam- e^{lam- t}) / (lam+ - lam-)
//   e_trans  = e^{-mu r^2 t}
//   coupling = -(c^2 + r^-2/lam^2) * d_quot
//
// evaluated in the cancellation-free midpoint form: with zb = mid*t and
// dt = half_gap*t,
//
//   g_nn   = e^{zb} (cosh dt - zb*sinhc dt),   h_long = e^{zb} (cosh dt + zb*sinhc dt),
//   d_quot = t e^{zb} sinhc dt,                sinhc x = sinh(x)/x,
//
// which is exact in every regime and smooth through the degeneracy
// (sinhc switches to its 5-term series for |dt| < 1e-4).  The matrix is
//
//   G(xi,t) = [ g_nn               -i xi^T d_quot                        ]
//             [ i xi coupling      e_trans (I - P) + h_long P            ],
//
// P = xi xi^T / r^2 the longitudinal projector.

#include "nsplab/symbol.hpp"

#include <vector>

namespace nsplab {

struct ModeScalars {
  double g_nn;
  double d_quot;
  double h_long;
  double e_transverse;
  double coupling_mn;
};

// r > 0, t >= 0.  All five values are finite everywhere, including at the
// degenerate radius.
ModeScalars mode_scalars(const FluidParams& p, double r, double t);

// Full 4x4 semigroup matrix; G(xi, 0) = I exactly.
Mat4c green_matrix(const FluidParams& p, const Vec3& xi, double t);

struct GreenApplied {
  Complex n;
  Vec3c m;
  Vec3c e;  // electric mode -i xi |xi|^-2 n, so |e| = |n| / |xi|
};

// Propagate one mode (n0, m0) and report the associated electric mode.
GreenApplied apply_green_mode(const FluidParams& p, const Vec3& xi, double t,
                              Complex n0, const Vec3c& m0);

// Smooth low-frequency window: 1 on [0, r_cut], 0 beyond r_cut + 1,
// exp(1 - 1/(1 - s^2)) with s = r - r_cut on the transition interval.
double chi_cutoff(double r, double r_cut);

// ---------------------------------------------------------------------------
// Asymptotic regime checks.

// Row of |exact - approximant| values at one radius.  Low-frequency entries
// (approximants built from the quadratic frequency expansion) are NaN
// outside the oscillatory regime; high-frequency entries are always filled.
struct AsymptoticRow {
  double r;
  double err_g_nn;      // max over t_grid
  double err_h_long;
  double err_d_quot;
  double err_b;         // |b - (1/lam + lam c^2 r^2 / 2)|
  double err_lam_plus;  // |lam+ - (-(2mu+nu) r^2 + c^2/(2mu+nu))|
  double err_lam_minus; // |lam- - (-c^2/(2mu+nu))|
  double err_lam_zero;  // |lam0 + mu r^2|, identically 0
};

std::vector<AsymptoticRow> asymptotic_check(const FluidParams& p,
                                            const std::vector<double>& r_grid,
                                            const std::vector<double>& t_grid);

// Uniform high-frequency envelope: sup over r in [eta, 10*eta] of the four
// scalar magnitudes, fitted to C e^{-R0 t} on the positive-t entries.
struct EnvelopeFit {
  double rate;           // R0, must come out > 0
  double log_prefactor;  // log C
  std::vector<double> t;
  std::vector<double> sup;
};

EnvelopeFit high_freq_envelope(const FluidParams& p, double eta,
                               const std::vector<double>& t_grid);

}  // namespace nsplab
