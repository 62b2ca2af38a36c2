#pragma once

// Periodic-box pseudo-spectral solver for the nonlinear system
//
//   dn/dt + div m = 0
//   dm/dt + c^2 grad n + grad Phi = mu lap(m/rho) + (mu+nu) grad div(m/rho)
//   Phi   = lam^-2 (-lap)^-1 n,     rho = 1 + n,
//
// advanced with the exact per-mode linear propagator as an exponential
// integrator.  Collecting the quadratic remainder after subtracting the
// linearization gives dU/dt = A U + Q(U) with Q = -div F in the momentum
// rows only,
//
//   F = -lam^-2 w (x) w + (lam^-2/2)|w|^2 I        (w = grad (-lap)^-1 n)
//     + (p(1+n) - p(1) - c^2 n) I                  (p(rho) = rho^gamma/gamma)
//     + m (x) m / (1+n)
//     + mu grad v + (mu+nu) (div v) I              (v = n m/(1+n), from
//                                                    m/rho = m - v).
//
// One step of the two-stage scheme, with phi1(z) = (e^z - 1)/z and
// phi2(z) = (e^z - 1 - z)/z^2 applied to A dt per mode:
//
//   a      = e^{A dt} U + dt phi1(A dt) Q(U, t)
//   U_next = a + dt phi2(A dt) (Q(a, t+dt) - Q(U, t)).
//
// Matrix functions reduce to the longitudinal 2x2 block on (nhat, khat.mhat)
// plus the transverse scalar -mu|k|^2, so each f(A dt) is two numbers
// (S, D) with f = S I + D (A dt); coefficients depend on |k| only and are
// cached per integer squared index.

#include "nsplab/green.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace nsplab {

struct GridSpec {
  int n = 32;            // modes per axis, power of two
  double box = 40.0;     // period L; wavenumbers are (2 pi / L) * integer
  double dealias_fraction = 2.0 / 3.0;

  int size() const { return n * n * n; }
  int flat(int ix, int iy, int iz) const { return ix + n * (iy + n * iz); }
  // Signed mode index of a storage index (DFT ordering).
  int signed_index(int i) const { return i < n / 2 ? i : i - n; }
  double wavenumber(int signed_idx) const { return 2.0 * kPi / box * signed_idx; }
  int dealias_limit() const {
    return static_cast<int>(std::floor(n * dealias_fraction / 2.0));
  }
  void validate() const;
};

// Spectral state under the convention f(x) = sum_k fhat(k) e^{i k.x}.
struct SimState {
  double time = 0.0;
  std::vector<Complex> n_hat;
  std::array<std::vector<Complex>, 3> m_hat;
};

struct StepperConfig {
  double dt = 0.02;
  int scheme = 2;             // 1 = exponential Euler, 2 = two-stage
  double t_end = 20.0;
  int series_stride = 25;     // steps between recorded diagnostic rows
  int snapshot_stride = 0;    // steps between snapshot callbacks, 0 = never
  bool nonlinear = true;
  double vacuum_floor = 0.5;  // abort if min(1 + n) drops below
  double blowup_factor = 10.0;
  void validate() const;
};

// Additive spectral source (n row, then momentum rows); used by the
// manufactured-solution tests.  Called with the accumulator arrays.
using SpectralSource = std::function<void(double t, std::vector<Complex>& add_n,
                                          std::array<std::vector<Complex>, 3>& add_m)>;

// Complex 3D FFT on the flattened x-fastest layout; forward carries the
// 1/N^3 so that to_physical(to_spectral(f)) = f under the e^{+ikx} sum.
class Fft3 {
 public:
  explicit Fft3(int n);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;
  void to_spectral(std::vector<Complex>& a) const;
  void to_physical(std::vector<Complex>& a) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_;
};

// Phi = lam^-2 n / |k|^2 (zero mode pinned to 0), E = i k Phi.
// Throws if the density has a nonzero mean mode.
void poisson_solve(const GridSpec& grid, const FluidParams& p,
                   const std::vector<Complex>& n_hat, std::vector<Complex>& phi_hat,
                   std::array<std::vector<Complex>, 3>& e_hat);

// Momentum-row nonlinear term Q(U); the density row is identically zero.
// Products are formed pointwise on the physical grid and the result is
// dealiased with the 2/3-rule mask.  Throws on a vacuum state.
void nonlinear_rhs(const GridSpec& grid, const FluidParams& p, const Fft3& fft,
                   const SimState& state, double vacuum_floor,
                   std::array<std::vector<Complex>, 3>& q_m);

class Simulator {
 public:
  Simulator(const GridSpec& grid, const FluidParams& params, const StepperConfig& cfg);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimState& state() { return state_; }
  const SimState& state() const { return state_; }
  const GridSpec& grid() const { return grid_; }
  void set_state(SimState s);
  void set_source(SpectralSource s) { source_ = std::move(s); }

  void step();

 private:
  struct ModeCoeffs;
  const ModeCoeffs& coeffs(int idx2);
  void eval_rhs(const SimState& s, std::vector<Complex>& qn,
                std::array<std::vector<Complex>, 3>& qm);

  GridSpec grid_;
  FluidParams params_;
  StepperConfig cfg_;
  Fft3 fft_;
  SimState state_;
  SpectralSource source_;
  std::vector<std::unique_ptr<ModeCoeffs>> cache_;
  // scratch
  std::vector<Complex> qn_, qn2_;
  std::array<std::vector<Complex>, 3> qm_, qm2_;
  SimState stage_;
};

// Exact linear evolution (per-mode closed-form propagator), the reference
// for the linear-limit and small-amplitude tests.
SimState apply_exact_linear(const GridSpec& grid, const FluidParams& p,
                            const SimState& s, double t);

// Diagnostics.
double state_l2(const GridSpec& grid, const std::vector<Complex>& f);  // sqrt(L^3 sum |f|^2)
double momentum_l2(const GridSpec& grid, const SimState& s);
double electric_l2(const GridSpec& grid, const FluidParams& p, const SimState& s);
double energy_diagnostic(const GridSpec& grid, const FluidParams& p, const SimState& s);
double mass_defect(const GridSpec& grid, const SimState& s);  // |L^3 nhat[0]|
double conjugate_symmetry_defect(const GridSpec& grid, const SimState& s);
double min_physical_density(const GridSpec& grid, const Fft3& fft, const SimState& s);

// Deterministic band-limited initial data of amplitude eps: a fixed
// trigonometric pattern, or a seeded random field (both zero-mean, real).
SimState trig_initial(const GridSpec& grid, double eps);
SimState seeded_initial(const GridSpec& grid, double eps, std::uint64_t seed);

struct SimSeriesRow {
  double t = 0.0;
  double n_l2 = 0.0;
  double m_l2 = 0.0;
  double e_l2 = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  double symmetry = 0.0;
  double min_density = 0.0;
};

struct SimResult {
  std::vector<SimSeriesRow> series;
  SimState final_state;
  int steps = 0;
};

using SnapshotSink = std::function<void(const SimState&)>;

// Advance to t_end recording diagnostics every series_stride steps (plus
// the initial and final states).  Throws on vacuum or on norm growth past
// blowup_factor times the initial norm.
SimResult run_simulation(const GridSpec& grid, const FluidParams& params,
                         const StepperConfig& cfg, const SimState& initial,
                         const SpectralSource& source = nullptr,
                         const SnapshotSink& snapshot = nullptr);

}  // namespace nsplab
