#include "nsplab/symbol.hpp"

namespace nsplab {

Mat4c assemble_symbol(const FluidParams& p, const Vec3& xi) {
  p.validate();
  const double r2 = xi.squaredNorm();
  if (!(r2 > 0.0) && p.poisson)
    throw std::invalid_argument("assemble_symbol: xi = 0 is singular with the coupling on");
  if (!xi.allFinite()) throw std::invalid_argument("assemble_symbol: non-finite xi");

  const double c2 = p.sound_speed * p.sound_speed;
  const double press = c2 + (r2 > 0.0 ? p.coupling() / r2 : 0.0);
  const Complex i_unit(0.0, 1.0);

  Mat4c a = Mat4c::Zero();
  for (int j = 0; j < 3; ++j) {
    a(0, 1 + j) = -i_unit * xi[j];          // continuity row: -i xi . m
    a(1 + j, 0) = -i_unit * xi[j] * press;  // pressure + electrostatic force
  }
  for (int j = 0; j < 3; ++j) {
    a(1 + j, 1 + j) -= p.mu * r2;
    for (int l = 0; l < 3; ++l) a(1 + j, 1 + l) -= (p.mu + p.nu) * xi[j] * xi[l];
  }
  return a;
}

EigenTriple eigen_decompose(const FluidParams& p, double r) {
  p.validate();
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("eigen_decompose: radius must be finite and >= 0");

  const double r2 = r * r;
  const double c2 = p.sound_speed * p.sound_speed;
  const double product = c2 * r2 + p.coupling();  // lambda_plus * lambda_minus
  const double mid = -p.theta_half() * r2;        // (lambda_plus + lambda_minus)/2
  const double tf = p.theta_full();
  const double disc = 4.0 * product - tf * tf * r2 * r2;

  EigenTriple out;
  out.lambda_zero = -p.mu * r2;
  out.discriminant = disc;

  const double thresh = 1e-8 * std::max(1.0, tf * tf * r2 * r2);
  if (std::abs(disc) < thresh) {
    out.regime = SpectralRegime::degenerate;
    out.lambda_plus = Complex(mid, 0.0);
    out.lambda_minus = Complex(mid, 0.0);
  } else if (disc > 0.0) {
    out.regime = SpectralRegime::oscillatory;
    const double b = 0.5 * std::sqrt(disc);
    out.lambda_plus = Complex(mid, b);
    out.lambda_minus = Complex(mid, -b);
  } else {
    out.regime = SpectralRegime::overdamped;
    // Fast branch by direct subtraction, slow branch via the product of
    // roots so the near-cancellation at large r costs no accuracy.
    const double fast = mid - 0.5 * std::sqrt(-disc);
    out.lambda_plus = Complex(fast, 0.0);
    out.lambda_minus = Complex(product / fast, 0.0);
  }
  return out;
}

double oscillation_frequency(const FluidParams& p, double r) {
  const EigenTriple e = eigen_decompose(p, r);
  if (e.discriminant <= 0.0)
    throw std::domain_error("oscillation_frequency: mode is not oscillatory");
  return 0.5 * std::sqrt(e.discriminant);
}

double oscillation_frequency_quadratic(const FluidParams& p, double r) {
  const double c2 = p.sound_speed * p.sound_speed;
  return 1.0 / p.debye + 0.5 * p.debye * c2 * r * r;
}

double characteristic_residual(const FluidParams& p, double r, Complex lam) {
  p.validate();
  const double r2 = r * r;
  const double c2 = p.sound_speed * p.sound_speed;
  const Complex transverse = lam + p.mu * r2;
  const Complex quad = lam * lam + p.theta_full() * r2 * lam + (c2 * r2 + p.coupling());
  const double scale = std::max({1.0, std::abs(lam), p.mu * r2});
  return std::abs(transverse * transverse * quad) / (scale * scale * scale * scale);
}

Complex lambda_plus_leading(const FluidParams& p, double r) {
  const double tf = p.theta_full();
  return Complex(-tf * r * r + p.sound_speed * p.sound_speed / tf, 0.0);
}

Complex lambda_minus_leading(const FluidParams& p) {
  return Complex(-p.sound_speed * p.sound_speed / p.theta_full(), 0.0);
}

}  // namespace nsplab
