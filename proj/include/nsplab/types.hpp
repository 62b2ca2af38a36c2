#pragma once

// Shared scalar/vector aliases and the fluid parameter set used everywhere.
//
// The model is an isothermal-ish compressible fluid with self-consistent
// electrostatic coupling, linearized about a constant state (rho_bar, 0).
// All spectral quantities live on the 4-dimensional mode vector
// (density, momentum_x, momentum_y, momentum_z).

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <cmath>

namespace nsplab {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Vec4c = Eigen::Vector4cd;
using Mat4c = Eigen::Matrix4cd;

constexpr double kPi = 3.14159265358979323846;

struct FluidParams {
  double mu = 1.0;           // shear viscosity, > 0
  double nu = 0.0;           // bulk-ish second viscosity, 2/3*mu + nu >= 0
  double sound_speed = 1.0;  // c = sqrt(p'(rho_bar)) > 0
  double debye = 1.0;        // screening length lambda > 0
  double rho_bar = 1.0;      // background density > 0
  double gamma = 2.0;        // pressure law p(rho) = rho^gamma / gamma
  bool poisson = true;       // false: drop the electrostatic coupling entirely

  // Damping rate of the longitudinal (acoustic) branch per unit |xi|^2.
  double theta_half() const { return mu + 0.5 * nu; }
  // Full longitudinal viscosity 2*mu + nu.
  double theta_full() const { return 2.0 * mu + nu; }
  // 1/lambda^2 when the electrostatic coupling is on, else 0.
  double coupling() const { return poisson ? 1.0 / (debye * debye) : 0.0; }

  void validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(mu) || bad(nu) || bad(sound_speed) || bad(debye) || bad(rho_bar) || bad(gamma))
      throw std::invalid_argument("FluidParams: non-finite parameter");
    if (mu <= 0.0) throw std::invalid_argument("FluidParams: mu must be > 0");
    if (2.0 / 3.0 * mu + nu < 0.0)
      throw std::invalid_argument("FluidParams: need 2/3*mu + nu >= 0");
    if (sound_speed <= 0.0) throw std::invalid_argument("FluidParams: sound_speed must be > 0");
    if (debye <= 0.0) throw std::invalid_argument("FluidParams: debye must be > 0");
    if (rho_bar <= 0.0) throw std::invalid_argument("FluidParams: rho_bar must be > 0");
    if (gamma < 1.0) throw std::invalid_argument("FluidParams: gamma must be >= 1");
  }
};

}  // namespace nsplab
