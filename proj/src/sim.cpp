#include "nsplab/sim.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nsplab/quadrature.hpp"

namespace nsplab {

void GridSpec::validate() const {
  if (n < 8 || n > 64 || (n & (n - 1)) != 0)
    throw std::invalid_argument("GridSpec: n must be a power of two in [8, 64]");
  if (!(box > 0.0)) throw std::invalid_argument("GridSpec: box must be > 0");
  if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
    throw std::invalid_argument("GridSpec: dealias_fraction must be in (0, 1]");
}

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("StepperConfig: dt must be > 0");
  if (scheme != 1 && scheme != 2)
    throw std::invalid_argument("StepperConfig: scheme must be 1 or 2");
  if (!(t_end >= 0.0)) throw std::invalid_argument("StepperConfig: t_end must be >= 0");
  if (series_stride < 1) throw std::invalid_argument("StepperConfig: series_stride must be >= 1");
  if (snapshot_stride < 0)
    throw std::invalid_argument("StepperConfig: snapshot_stride must be >= 0");
  if (!(vacuum_floor > 0.0) || !(vacuum_floor < 1.0))
    throw std::invalid_argument("StepperConfig: vacuum_floor must be in (0, 1)");
  if (!(blowup_factor > 1.0))
    throw std::invalid_argument("StepperConfig: blowup_factor must be > 1");
}

// ---------------------------------------------------------------------------
// FFT wrapper.

struct Fft3::Impl {
  mutable Eigen::FFT<double> fft;
  mutable std::vector<Complex> in, out;
};

Fft3::Fft3(int n) : impl_(new Impl), n_(n) {
  impl_->in.resize(n);
  impl_->out.resize(n);
}

Fft3::~Fft3() = default;

namespace {

void transform_axis_impl(Eigen::FFT<double>& fft, std::vector<Complex>& in,
                         std::vector<Complex>& out, int n, int axis, bool forward,
                         std::vector<Complex>& a) {
  const int stride = axis == 0 ? 1 : (axis == 1 ? n : n * n);
  for (int outer = 0; outer < n; ++outer) {
    for (int inner = 0; inner < n; ++inner) {
      int base;
      if (axis == 0) base = n * (inner + n * outer);
      else if (axis == 1) base = inner + n * n * outer;
      else base = inner + n * outer;
      for (int j = 0; j < n; ++j) in[j] = a[base + j * stride];
      if (forward) fft.fwd(out, in);
      else fft.inv(out, in);
      for (int j = 0; j < n; ++j) a[base + j * stride] = out[j];
    }
  }
}

}  // namespace

void Fft3::to_spectral(std::vector<Complex>& a) const {
  if (static_cast<int>(a.size()) != n_ * n_ * n_)
    throw std::invalid_argument("Fft3: array size mismatch");
  for (int axis = 0; axis < 3; ++axis)
    transform_axis_impl(impl_->fft, impl_->in, impl_->out, n_, axis, true, a);
  const double scale = 1.0 / (static_cast<double>(n_) * n_ * n_);
  for (Complex& z : a) z *= scale;
}

void Fft3::to_physical(std::vector<Complex>& a) const {
  if (static_cast<int>(a.size()) != n_ * n_ * n_)
    throw std::invalid_argument("Fft3: array size mismatch");
  for (int axis = 0; axis < 3; ++axis)
    transform_axis_impl(impl_->fft, impl_->in, impl_->out, n_, axis, false, a);
  const double scale = static_cast<double>(n_) * n_ * n_;
  for (Complex& z : a) z *= scale;
}

// ---------------------------------------------------------------------------
// phi functions and their divided differences.

namespace {

Complex sinhc_c(Complex x) {
  if (std::abs(x) < 1e-4) {
    const Complex x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) / x;
}

// phi1(z) = (e^z - 1)/z via e^z - 1 = 2 e^{z/2} sinh(z/2), cancellation-free.
Complex phi1_c(Complex z) {
  if (std::abs(z) < 1e-6) return 1.0 + z * (0.5 + z / 6.0);
  return 2.0 * std::exp(0.5 * z) * std::sinh(0.5 * z) / z;
}

// phi2(z) = (e^z - 1 - z)/z^2.
Complex phi2_c(Complex z) {
  const double az = std::abs(z);
  if (az < 0.25) {
    Complex sum = 0.5, term = 0.5;
    for (int j = 1; j <= 24; ++j) {
      term *= z / static_cast<double>(j + 2);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

enum class Fn { phi1, phi2 };

Complex eval_fn(Fn f, Complex z) { return f == Fn::phi1 ? phi1_c(z) : phi2_c(z); }

// First divided difference D = (f(zp) - f(zm))/(zp - zm), stable through the
// confluent limit: direct quotient when the gap is resolvable, bivariate
// series when both arguments are small, midpoint-hyperbolic closed form
// otherwise.
Complex divided_difference(Fn f, Complex zp, Complex zm) {
  const Complex gap = zp - zm;
  const Complex zbar = 0.5 * (zp + zm);
  if (std::abs(gap) > 1e-4 * std::max(1.0, std::abs(zbar)))
    return (eval_fn(f, zp) - eval_fn(f, zm)) / gap;

  if (std::max(std::abs(zp), std::abs(zm)) < 0.25) {
    // f(z) = sum_n z^n / (n+q)!  ->  D = sum_{n>=1} h_n/(n+q)! with
    // h_{n+1} = zp h_n + zm^n (the complete homogeneous symmetric sums).
    const int q = f == Fn::phi1 ? 1 : 2;
    Complex h = 1.0, zm_pow = zm, sum = 0.0;
    double fact = 1.0;
    for (int j = 1; j <= q; ++j) fact *= j;  // (0+q)! left out; start at n=1
    for (int n = 1; n <= 30; ++n) {
      fact *= n + q;
      const Complex term = h / fact;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::max(std::abs(sum), 1e-30)) break;
      h = zp * h + zm_pow;
      zm_pow *= zm;
    }
    return sum;
  }

  const Complex delta = 0.5 * gap;
  const Complex ez = std::exp(zbar);
  const Complex ch = std::cosh(delta);
  const Complex snc = sinhc_c(delta);
  const Complex prod = zp * zm;
  if (f == Fn::phi1) return (ez * (zbar * snc - ch) + 1.0) / prod;
  return (ez * ((zbar * zbar + delta * delta) * snc - 2.0 * zbar * ch) + 2.0 * zbar + prod) /
         (prod * prod);
}

// f(A dt) = S I + T A on the longitudinal block (T absorbs the dt).
struct SD {
  double s, t;
};

SD phi_coeffs(Fn f, Complex lam_p, Complex lam_m, double dt) {
  const Complex zp = lam_p * dt, zm = lam_m * dt;
  const Complex d = divided_difference(f, zp, zm);
  const Complex s = eval_fn(f, zp) - zp * d;
  return {s.real(), (d * dt).real()};
}

}  // namespace

// ---------------------------------------------------------------------------
// Per-mode propagator coefficients.

struct Simulator::ModeCoeffs {
  double r = 0.0;      // |k|
  double press = 0.0;  // c^2 + coupling/|k|^2 (0 at k = 0)
  double tf = 0.0;     // 2 mu + nu
  // Each triple applies S x + T (A x) on the longitudinal pair and scales
  // the transverse part by tr.
  double se = 1.0, te = 0.0, tr_e = 1.0;  // e^{A dt}
  double s1 = 0.0, t1 = 0.0, tr_1 = 0.0;  // dt phi1(A dt)
  double s2 = 0.0, t2 = 0.0, tr_2 = 0.0;  // dt phi2(A dt)
};

const Simulator::ModeCoeffs& Simulator::coeffs(int idx2) {
  auto& slot = cache_[idx2];
  if (slot) return *slot;
  auto c = std::make_unique<ModeCoeffs>();
  const double dt = cfg_.dt;
  c->tf = params_.theta_full();
  if (idx2 == 0) {
    // Pinned zero-mean density and no linear term on the momentum mean.
    c->s1 = dt;
    c->tr_1 = dt;
    c->s2 = 0.5 * dt;
    c->tr_2 = 0.5 * dt;
  } else {
    const double r = grid_.wavenumber(1) * std::sqrt(static_cast<double>(idx2));
    c->r = r;
    c->press = params_.sound_speed * params_.sound_speed + params_.coupling() / (r * r);
    const EigenTriple et = eigen_decompose(params_, r);
    const ModeScalars ms = mode_scalars(params_, r, dt);
    c->se = ms.g_nn;
    c->te = ms.d_quot;
    c->tr_e = ms.e_transverse;
    const SD p1 = phi_coeffs(Fn::phi1, et.lambda_plus, et.lambda_minus, dt);
    c->s1 = dt * p1.s;
    c->t1 = dt * p1.t;
    c->tr_1 = dt * phi1_c(Complex(et.lambda_zero * dt, 0.0)).real();
    const SD p2 = phi_coeffs(Fn::phi2, et.lambda_plus, et.lambda_minus, dt);
    c->s2 = dt * p2.s;
    c->t2 = dt * p2.t;
    c->tr_2 = dt * phi2_c(Complex(et.lambda_zero * dt, 0.0)).real();
  }
  slot = std::move(c);
  return *slot;
}

namespace {

// y += S x + T (A x) longitudinally, y_perp += tr x_perp; khat may be null
// for the k = 0 mode (A = 0 there).
inline void mode_comb(double r, double press, double tf, const double* khat,
                      double S, double T, double tr, const Complex& xn,
                      const Complex* xm, Complex& yn, Complex* ym) {
  if (khat == nullptr) {
    yn += S * xn;
    for (int j = 0; j < 3; ++j) ym[j] += S * xm[j];
    return;
  }
  const Complex mlc = khat[0] * xm[0] + khat[1] * xm[1] + khat[2] * xm[2];
  const Complex i_r(0.0, r);
  const Complex a_n = -i_r * mlc;
  const Complex a_m = -i_r * press * xn - tf * r * r * mlc;
  yn += S * xn + T * a_n;
  const Complex ylc = S * mlc + T * a_m;
  for (int j = 0; j < 3; ++j) ym[j] += tr * (xm[j] - mlc * khat[j]) + ylc * khat[j];
}

void zero_fields(int size, std::vector<Complex>& qn,
                 std::array<std::vector<Complex>, 3>& qm) {
  qn.assign(size, Complex(0.0, 0.0));
  for (auto& c : qm) c.assign(size, Complex(0.0, 0.0));
}

}  // namespace

Simulator::Simulator(const GridSpec& grid, const FluidParams& params,
                     const StepperConfig& cfg)
    : grid_(grid), params_(params), cfg_(cfg), fft_(grid.n) {
  grid_.validate();
  params_.validate();
  cfg_.validate();
  const int half = grid_.n / 2;
  cache_.resize(3 * half * half + 1);
  const int size = grid_.size();
  state_.n_hat.assign(size, Complex(0.0, 0.0));
  for (auto& c : state_.m_hat) c.assign(size, Complex(0.0, 0.0));
  stage_ = state_;
}

Simulator::~Simulator() = default;

void Simulator::set_state(SimState s) {
  if (static_cast<int>(s.n_hat.size()) != grid_.size())
    throw std::invalid_argument("Simulator: state size mismatch");
  state_ = std::move(s);
}

void Simulator::eval_rhs(const SimState& s, std::vector<Complex>& qn,
                         std::array<std::vector<Complex>, 3>& qm) {
  zero_fields(grid_.size(), qn, qm);
  if (cfg_.nonlinear) nonlinear_rhs(grid_, params_, fft_, s, cfg_.vacuum_floor, qm);
  if (source_) source_(s.time, qn, qm);
}

void Simulator::step() {
  const double t = state_.time;
  eval_rhs(state_, qn_, qm_);

  const int n = grid_.n;
  stage_.n_hat.assign(grid_.size(), Complex(0.0, 0.0));
  for (auto& c : stage_.m_hat) c.assign(grid_.size(), Complex(0.0, 0.0));

  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid_.flat(ix, iy, iz);
        const int sx = grid_.signed_index(ix), sy = grid_.signed_index(iy),
                  sz = grid_.signed_index(iz);
        const int idx2 = sx * sx + sy * sy + sz * sz;
        const ModeCoeffs& C = coeffs(idx2);
        double khat_store[3];
        const double* khat = nullptr;
        if (idx2 != 0) {
          const double inv = 1.0 / std::sqrt(static_cast<double>(idx2));
          khat_store[0] = sx * inv;
          khat_store[1] = sy * inv;
          khat_store[2] = sz * inv;
          khat = khat_store;
        }
        const Complex un = state_.n_hat[i];
        const Complex um[3] = {state_.m_hat[0][i], state_.m_hat[1][i], state_.m_hat[2][i]};
        const Complex q[4] = {qn_[i], qm_[0][i], qm_[1][i], qm_[2][i]};
        Complex an(0.0, 0.0), am[3] = {Complex(0, 0), Complex(0, 0), Complex(0, 0)};
        mode_comb(C.r, C.press, C.tf, khat, C.se, C.te, C.tr_e, un, um, an, am);
        mode_comb(C.r, C.press, C.tf, khat, C.s1, C.t1, C.tr_1, q[0], q + 1, an, am);
        stage_.n_hat[i] = an;
        for (int j = 0; j < 3; ++j) stage_.m_hat[j][i] = am[j];
      }
  stage_.time = t + cfg_.dt;

  if (cfg_.scheme == 2) {
    eval_rhs(stage_, qn2_, qm2_);
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const int i = grid_.flat(ix, iy, iz);
          const int sx = grid_.signed_index(ix), sy = grid_.signed_index(iy),
                    sz = grid_.signed_index(iz);
          const int idx2 = sx * sx + sy * sy + sz * sz;
          const ModeCoeffs& C = coeffs(idx2);
          double khat_store[3];
          const double* khat = nullptr;
          if (idx2 != 0) {
            const double inv = 1.0 / std::sqrt(static_cast<double>(idx2));
            khat_store[0] = sx * inv;
            khat_store[1] = sy * inv;
            khat_store[2] = sz * inv;
            khat = khat_store;
          }
          const Complex dq[4] = {qn2_[i] - qn_[i], qm2_[0][i] - qm_[0][i],
                                 qm2_[1][i] - qm_[1][i], qm2_[2][i] - qm_[2][i]};
          Complex an = stage_.n_hat[i];
          Complex am[3] = {stage_.m_hat[0][i], stage_.m_hat[1][i], stage_.m_hat[2][i]};
          mode_comb(C.r, C.press, C.tf, khat, C.s2, C.t2, C.tr_2, dq[0], dq + 1, an, am);
          stage_.n_hat[i] = an;
          for (int j = 0; j < 3; ++j) stage_.m_hat[j][i] = am[j];
        }
  }

  std::swap(state_, stage_);
  state_.time = t + cfg_.dt;
}

// ---------------------------------------------------------------------------
// Spatial operators.

void poisson_solve(const GridSpec& grid, const FluidParams& p,
                   const std::vector<Complex>& n_hat, std::vector<Complex>& phi_hat,
                   std::array<std::vector<Complex>, 3>& e_hat) {
  const int size = grid.size();
  if (static_cast<int>(n_hat.size()) != size)
    throw std::invalid_argument("poisson_solve: size mismatch");
  if (std::abs(n_hat[0]) > 1e-13)
    throw std::invalid_argument("poisson_solve: density must have zero mean");
  phi_hat.assign(size, Complex(0.0, 0.0));
  for (auto& c : e_hat) c.assign(size, Complex(0.0, 0.0));
  const double cpl = 1.0 / (p.debye * p.debye);
  const int n = grid.n;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const double kx = grid.wavenumber(grid.signed_index(ix));
        const double ky = grid.wavenumber(grid.signed_index(iy));
        const double kz = grid.wavenumber(grid.signed_index(iz));
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) continue;
        const Complex phi = cpl * n_hat[i] / k2;
        phi_hat[i] = phi;
        e_hat[0][i] = Complex(0.0, kx) * phi;
        e_hat[1][i] = Complex(0.0, ky) * phi;
        e_hat[2][i] = Complex(0.0, kz) * phi;
      }
}

void nonlinear_rhs(const GridSpec& grid, const FluidParams& p, const Fft3& fft,
                   const SimState& state, double vacuum_floor,
                   std::array<std::vector<Complex>, 3>& q_m) {
  if (p.rho_bar != 1.0)
    throw std::invalid_argument("nonlinear_rhs: requires unit background density");
  const int size = grid.size();
  for (auto& c : q_m) c.assign(size, Complex(0.0, 0.0));
  const int n = grid.n;
  const double cpl = p.coupling();
  const double c2 = p.sound_speed * p.sound_speed;

  std::vector<Complex> n_phys = state.n_hat;
  fft.to_physical(n_phys);
  std::array<std::vector<Complex>, 3> m_phys = state.m_hat;
  for (auto& c : m_phys) fft.to_physical(c);

  double min_rho = std::numeric_limits<double>::infinity();
  for (const Complex& z : n_phys) min_rho = std::min(min_rho, 1.0 + z.real());
  if (min_rho <= vacuum_floor) {
    std::ostringstream msg;
    msg << "nonlinear_rhs: vacuum guard tripped, min density " << min_rho;
    throw std::runtime_error(msg.str());
  }

  // w = grad (-lap)^-1 n, only needed with the coupling on.
  std::array<std::vector<Complex>, 3> w_phys;
  if (cpl != 0.0) {
    for (auto& c : w_phys) c.assign(size, Complex(0.0, 0.0));
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          const int i = grid.flat(ix, iy, iz);
          const double k[3] = {grid.wavenumber(grid.signed_index(ix)),
                               grid.wavenumber(grid.signed_index(iy)),
                               grid.wavenumber(grid.signed_index(iz))};
          const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
          if (k2 == 0.0) continue;
          for (int j = 0; j < 3; ++j)
            w_phys[j][i] = Complex(0.0, k[j] / k2) * state.n_hat[i];
        }
    for (auto& c : w_phys) fft.to_physical(c);
  }

  // Pointwise flux: F_ab = -cpl w_a w_b + m_a m_b/(1+n)
  //                        + delta_ab (cpl/2 |w|^2 + dp(n)),
  // stored as the six components xx, yy, zz, xy, xz, yz, plus v = n m/(1+n).
  static const int ia[6] = {0, 1, 2, 0, 0, 1};
  static const int ib[6] = {0, 1, 2, 1, 2, 2};
  std::array<std::vector<Complex>, 6> f_sym;
  for (auto& c : f_sym) c.assign(size, Complex(0.0, 0.0));
  std::array<std::vector<Complex>, 3> v;
  for (auto& c : v) c.assign(size, Complex(0.0, 0.0));

  for (int i = 0; i < size; ++i) {
    const double nv = n_phys[i].real();
    const double rho = 1.0 + nv;
    const double m[3] = {m_phys[0][i].real(), m_phys[1][i].real(), m_phys[2][i].real()};
    double wv[3] = {0.0, 0.0, 0.0};
    double w2 = 0.0;
    if (cpl != 0.0) {
      for (int j = 0; j < 3; ++j) wv[j] = w_phys[j][i].real();
      w2 = wv[0] * wv[0] + wv[1] * wv[1] + wv[2] * wv[2];
    }
    // p(rho) = rho^gamma/gamma; remainder of the linearization around 1.
    const double dp = (std::pow(rho, p.gamma) - 1.0) / p.gamma - c2 * nv;
    const double diag = 0.5 * cpl * w2 + dp;
    for (int comp = 0; comp < 6; ++comp) {
      const int a = ia[comp], b = ib[comp];
      double val = -cpl * wv[a] * wv[b] + m[a] * m[b] / rho;
      if (a == b) val += diag;
      f_sym[comp][i] = Complex(val, 0.0);
    }
    const double fac = nv / rho;
    for (int j = 0; j < 3; ++j) v[j][i] = Complex(fac * m[j], 0.0);
  }

  for (auto& c : f_sym) fft.to_spectral(c);
  for (auto& c : v) fft.to_spectral(c);

  // Q_b = -sum_a ik_a (F_ab + mu ik_a vhat_b + (mu+nu)(ik.vhat) delta_ab),
  // i.e. the viscous remainder contributes +mu|k|^2 vhat + (mu+nu) k (k.vhat).
  static const int sym_of[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  const int limit = grid.dealias_limit();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const int sx = grid.signed_index(ix), sy = grid.signed_index(iy),
                  sz = grid.signed_index(iz);
        if (std::abs(sx) > limit || std::abs(sy) > limit || std::abs(sz) > limit) {
          for (int b = 0; b < 3; ++b) q_m[b][i] = Complex(0.0, 0.0);
          continue;
        }
        const double k[3] = {grid.wavenumber(sx), grid.wavenumber(sy), grid.wavenumber(sz)};
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        Complex kdotv(0.0, 0.0);
        for (int a = 0; a < 3; ++a) kdotv += k[a] * v[a][i];
        for (int b = 0; b < 3; ++b) {
          Complex div(0.0, 0.0);
          for (int a = 0; a < 3; ++a) div += Complex(0.0, k[a]) * f_sym[sym_of[a][b]][i];
          q_m[b][i] = -div + p.mu * k2 * v[b][i] + (p.mu + p.nu) * k[b] * kdotv;
        }
      }
}

// ---------------------------------------------------------------------------
// Exact linear evolution and diagnostics.

SimState apply_exact_linear(const GridSpec& grid, const FluidParams& p,
                            const SimState& s, double t) {
  SimState out;
  out.time = s.time + t;
  const int size = grid.size();
  out.n_hat.assign(size, Complex(0.0, 0.0));
  for (auto& c : out.m_hat) c.assign(size, Complex(0.0, 0.0));
  const int n = grid.n;
  const double tf = p.theta_full();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const int sx = grid.signed_index(ix), sy = grid.signed_index(iy),
                  sz = grid.signed_index(iz);
        const int idx2 = sx * sx + sy * sy + sz * sz;
        const Complex un = s.n_hat[i];
        const Complex um[3] = {s.m_hat[0][i], s.m_hat[1][i], s.m_hat[2][i]};
        Complex an(0.0, 0.0), am[3] = {Complex(0, 0), Complex(0, 0), Complex(0, 0)};
        if (idx2 == 0) {
          mode_comb(0.0, 0.0, tf, nullptr, 1.0, 0.0, 1.0, un, um, an, am);
        } else {
          const double r = grid.wavenumber(1) * std::sqrt(static_cast<double>(idx2));
          const double press = p.sound_speed * p.sound_speed + p.coupling() / (r * r);
          const ModeScalars ms = mode_scalars(p, r, t);
          const double inv = 1.0 / std::sqrt(static_cast<double>(idx2));
          const double khat[3] = {sx * inv, sy * inv, sz * inv};
          mode_comb(r, press, tf, khat, ms.g_nn, ms.d_quot, ms.e_transverse, un, um, an, am);
        }
        out.n_hat[i] = an;
        for (int j = 0; j < 3; ++j) out.m_hat[j][i] = am[j];
      }
  return out;
}

double state_l2(const GridSpec& grid, const std::vector<Complex>& f) {
  std::vector<double> terms(f.size());
  for (size_t i = 0; i < f.size(); ++i) terms[i] = std::norm(f[i]);
  const double l3 = grid.box * grid.box * grid.box;
  return std::sqrt(l3 * pairwise_sum(std::move(terms)));
}

double momentum_l2(const GridSpec& grid, const SimState& s) {
  std::vector<double> terms(s.n_hat.size());
  for (size_t i = 0; i < terms.size(); ++i)
    terms[i] = std::norm(s.m_hat[0][i]) + std::norm(s.m_hat[1][i]) + std::norm(s.m_hat[2][i]);
  const double l3 = grid.box * grid.box * grid.box;
  return std::sqrt(l3 * pairwise_sum(std::move(terms)));
}

double electric_l2(const GridSpec& grid, const FluidParams& p, const SimState& s) {
  const int size = grid.size();
  const int n = grid.n;
  const double cpl = 1.0 / (p.debye * p.debye);
  std::vector<double> terms(size, 0.0);
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const int sx = grid.signed_index(ix), sy = grid.signed_index(iy),
                  sz = grid.signed_index(iz);
        const int idx2 = sx * sx + sy * sy + sz * sz;
        if (idx2 == 0) continue;
        const double r = grid.wavenumber(1) * std::sqrt(static_cast<double>(idx2));
        // |E| = cpl |nhat| / |k| per mode.
        const double amp = cpl * std::abs(s.n_hat[i]) / r;
        terms[i] = amp * amp;
      }
  const double l3 = grid.box * grid.box * grid.box;
  return std::sqrt(l3 * pairwise_sum(std::move(terms)));
}

double energy_diagnostic(const GridSpec& grid, const FluidParams& p, const SimState& s) {
  const double nn = state_l2(grid, s.n_hat);
  const double mm = momentum_l2(grid, s);
  const double ee = p.poisson ? electric_l2(grid, p, s) : 0.0;
  return nn * nn + mm * mm + ee * ee;
}

double mass_defect(const GridSpec& grid, const SimState& s) {
  const double l3 = grid.box * grid.box * grid.box;
  return l3 * std::abs(s.n_hat[0]);
}

double conjugate_symmetry_defect(const GridSpec& grid, const SimState& s) {
  const int n = grid.n;
  double worst = 0.0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const int j = grid.flat((n - ix) % n, (n - iy) % n, (n - iz) % n);
        worst = std::max(worst, std::abs(s.n_hat[i] - std::conj(s.n_hat[j])));
        for (int c = 0; c < 3; ++c)
          worst = std::max(worst, std::abs(s.m_hat[c][i] - std::conj(s.m_hat[c][j])));
      }
  return worst;
}

double min_physical_density(const GridSpec& grid, const Fft3& fft, const SimState& s) {
  std::vector<Complex> n_phys = s.n_hat;
  fft.to_physical(n_phys);
  double lo = std::numeric_limits<double>::infinity();
  for (const Complex& z : n_phys) lo = std::min(lo, 1.0 + z.real());
  (void)grid;
  return lo;
}

// ---------------------------------------------------------------------------
// Initial data.

namespace {

void mask_state(const GridSpec& grid, SimState& s) {
  const int n = grid.n;
  const int limit = grid.dealias_limit();
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const int sx = grid.signed_index(ix), sy = grid.signed_index(iy),
                  sz = grid.signed_index(iz);
        if (std::abs(sx) > limit || std::abs(sy) > limit || std::abs(sz) > limit) {
          s.n_hat[i] = Complex(0.0, 0.0);
          for (int c = 0; c < 3; ++c) s.m_hat[c][i] = Complex(0.0, 0.0);
        }
      }
  s.n_hat[0] = Complex(0.0, 0.0);
}

}  // namespace

SimState trig_initial(const GridSpec& grid, double eps) {
  grid.validate();
  const int n = grid.n;
  SimState s;
  s.n_hat.assign(grid.size(), Complex(0.0, 0.0));
  for (auto& c : s.m_hat) c.assign(grid.size(), Complex(0.0, 0.0));
  const double b = 2.0 * kPi / grid.box;
  const double h = grid.box / n;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const double x = h * ix, y = h * iy, z = h * iz;
        s.n_hat[i] = eps * (std::cos(b * x) * std::cos(2.0 * b * y) * std::cos(b * z) +
                            0.3 * std::sin(b * (x + y)));
        s.m_hat[0][i] = eps * (0.5 * std::sin(b * y) + 0.2 * std::cos(b * z));
        s.m_hat[1][i] = eps * (0.4 * std::cos(b * x) + 0.1 * std::sin(b * (y + z)));
        s.m_hat[2][i] = eps * 0.3 * std::sin(b * (x + z));
      }
  Fft3 fft(n);
  fft.to_spectral(s.n_hat);
  for (auto& c : s.m_hat) fft.to_spectral(c);
  mask_state(grid, s);
  return s;
}

SimState seeded_initial(const GridSpec& grid, double eps, std::uint64_t seed) {
  grid.validate();
  const int n = grid.n;
  SimState s;
  s.n_hat.assign(grid.size(), Complex(0.0, 0.0));
  for (auto& c : s.m_hat) c.assign(grid.size(), Complex(0.0, 0.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < grid.size(); ++i) {
    s.n_hat[i] = Complex(u(rng), 0.0);
    for (int c = 0; c < 3; ++c) s.m_hat[c][i] = Complex(u(rng), 0.0);
  }
  Fft3 fft(n);
  fft.to_spectral(s.n_hat);
  for (auto& c : s.m_hat) fft.to_spectral(c);
  // Keep only a soft low-mode band, then rescale so the physical amplitude
  // is eps.
  const int band = std::min(4, grid.dealias_limit());
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int i = grid.flat(ix, iy, iz);
        const int sx = grid.signed_index(ix), sy = grid.signed_index(iy),
                  sz = grid.signed_index(iz);
        if (std::abs(sx) > band || std::abs(sy) > band || std::abs(sz) > band) {
          s.n_hat[i] = Complex(0.0, 0.0);
          for (int c = 0; c < 3; ++c) s.m_hat[c][i] = Complex(0.0, 0.0);
        }
      }
  s.n_hat[0] = Complex(0.0, 0.0);
  std::vector<Complex> probe = s.n_hat;
  fft.to_physical(probe);
  double amp = 0.0;
  for (const Complex& z : probe) amp = std::max(amp, std::abs(z.real()));
  const double scale = amp > 0.0 ? eps / amp : 0.0;
  for (Complex& z : s.n_hat) z *= scale;
  for (auto& c : s.m_hat)
    for (Complex& z : c) z *= scale;
  return s;
}

// ---------------------------------------------------------------------------
// Driver.

SimResult run_simulation(const GridSpec& grid, const FluidParams& params,
                         const StepperConfig& cfg, const SimState& initial,
                         const SpectralSource& source, const SnapshotSink& snapshot) {
  grid.validate();
  params.validate();
  cfg.validate();
  const double steps_real = cfg.t_end / cfg.dt;
  const long long nsteps = std::llround(steps_real);
  if (std::abs(steps_real - static_cast<double>(nsteps)) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("run_simulation: t_end must be a multiple of dt");

  Simulator sim(grid, params, cfg);
  sim.set_state(initial);
  if (source) sim.set_source(source);
  Fft3 fft(grid.n);

  auto record = [&](SimResult& res) {
    const SimState& s = sim.state();
    SimSeriesRow row;
    row.t = s.time;
    row.n_l2 = state_l2(grid, s.n_hat);
    row.m_l2 = momentum_l2(grid, s);
    row.e_l2 = params.poisson ? electric_l2(grid, params, s) : 0.0;
    row.energy = energy_diagnostic(grid, params, s);
    row.mass = mass_defect(grid, s);
    row.symmetry = conjugate_symmetry_defect(grid, s);
    row.min_density = min_physical_density(grid, fft, s);
    res.series.push_back(row);
    return std::sqrt(row.n_l2 * row.n_l2 + row.m_l2 * row.m_l2);
  };

  SimResult res;
  const double norm0 = record(res);
  if (snapshot && cfg.snapshot_stride > 0) snapshot(sim.state());
  for (long long k = 1; k <= nsteps; ++k) {
    sim.step();
    const bool last = k == nsteps;
    if (k % cfg.series_stride == 0 || last) {
      const double norm = record(res);
      if (norm0 > 0.0 && norm > cfg.blowup_factor * norm0) {
        std::ostringstream msg;
        msg << "run_simulation: instability detected at t = " << sim.state().time
            << " (norm " << norm << " vs initial " << norm0 << ")";
        throw std::runtime_error(msg.str());
      }
    }
    if (snapshot && cfg.snapshot_stride > 0 && (k % cfg.snapshot_stride == 0 || last))
      snapshot(sim.state());
  }
  res.final_state = sim.state();
  res.steps = static_cast<int>(nsteps);
  return res;
}

}  // namespace nsplab
