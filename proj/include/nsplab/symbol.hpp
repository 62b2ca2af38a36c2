#pragma once

// Fourier symbol of the linearized system and its spectral decomposition.
//
// For a mode xi != 0 the 4x4 symbol acting on (n, m) is
//
//   A(xi) = [        0                 -i xi^T          ]
//           [ -i xi (c^2 + r^-2/lam^2)  -mu r^2 I - (mu+nu) xi xi^T ]
//
// with r = |xi|.  Its characteristic polynomial factors as
//
//   (lam + mu r^2)^2 * (lam^2 + (2mu+nu) r^2 lam + c^2 r^2 + 1/lam^2),
//
// i.e. a doubly degenerate transverse branch lam0 = -mu r^2 and a
// longitudinal pair
//
//   lam_pm = -(mu + nu/2) r^2 +- (i/2) sqrt(disc),
//   disc   = 4 (c^2 r^2 + 1/lam^2) - (2mu+nu)^2 r^4.
//
// disc > 0: damped oscillation (at r -> 0 the frequency tends to the plasma
// frequency 1/lam instead of vanishing acoustically); disc < 0: two real
// overdamped rates.  Without the electrostatic coupling the 1/lam^2 terms
// drop and the small-r behaviour is the usual acoustic c|xi|.

#include "nsplab/types.hpp"

namespace nsplab {

enum class SpectralRegime { oscillatory, degenerate, overdamped };

struct EigenTriple {
  Complex lambda_plus;   // fast branch in the overdamped regime
  Complex lambda_minus;
  double lambda_zero;    // transverse rate -mu r^2 (double multiplicity)
  double discriminant;   // 4(c^2 r^2 + coupling) - (2mu+nu)^2 r^4
  SpectralRegime regime;
};

// Assemble the symbol for one mode.  Requires xi != 0 when the
// electrostatic coupling is on (the r^-2 factor).
Mat4c assemble_symbol(const FluidParams& p, const Vec3& xi);

// Closed-form eigenvalues at radius r = |xi| >= 0.  The regime label uses
// the relative threshold |disc| < 1e-8 * max(1, (2mu+nu)^2 r^4).
EigenTriple eigen_decompose(const FluidParams& p, double r);

// Oscillation frequency b = sqrt(disc)/2 of the longitudinal pair.
// Requires the oscillatory regime (disc > 0).
double oscillation_frequency(const FluidParams& p, double r);

// Small-r expansion of b: plasma frequency plus dispersive correction,
// b ~ 1/lam + (lam c^2 / 2) r^2; the remainder is O(r^4).
double oscillation_frequency_quadratic(const FluidParams& p, double r);

// |(lam + mu r^2)^2 * (lam^2 + (2mu+nu) r^2 lam + c^2 r^2 + coupling)|
// normalized by max(1, |lam|, mu r^2)^4 so the value stays meaningful at
// large radii.  Zero (to tolerance) iff lam is an eigenvalue.
double characteristic_residual(const FluidParams& p, double r, Complex lam);

// Leading high-frequency behaviour of the longitudinal pair:
// the fast branch -(2mu+nu) r^2 + c^2/(2mu+nu), the slow branch
// -c^2/(2mu+nu).  The remainders decay as r -> infinity.
Complex lambda_plus_leading(const FluidParams& p, double r);
Complex lambda_minus_leading(const FluidParams& p);

}  // namespace nsplab
