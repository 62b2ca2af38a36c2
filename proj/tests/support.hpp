#pragma once

// Shared fixtures for the simulator tests.
//
// The manufactured problem places a handful of low modes with prescribed
// time dependence U*(t) and computes the forcing
//
//   R(t) = dU*/dt - A U*(t) - Q(U*(t))
//
// with the same spectral operators the stepper uses (assemble_symbol for A,
// nonlinear_rhs for Q), so U* is an exact solution of the dealiased
// discrete system and the stepper's global error against it is pure time
// discretization.

#include "nsplab/sim.hpp"
#include "nsplab/symbol.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace nsplab::testfix {

inline double state_max_diff(const SimState& a, const SimState& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.n_hat.size(); ++i)
    m = std::max(m, std::abs(a.n_hat[i] - b.n_hat[i]));
  for (int c = 0; c < 3; ++c)
    for (size_t i = 0; i < a.m_hat[c].size(); ++i)
      m = std::max(m, std::abs(a.m_hat[c][i] - b.m_hat[c][i]));
  return m;
}

inline double state_max_abs(const SimState& s) {
  double m = 0.0;
  for (const Complex& z : s.n_hat) m = std::max(m, std::abs(z));
  for (const auto& c : s.m_hat)
    for (const Complex& z : c) m = std::max(m, std::abs(z));
  return m;
}

inline SimState zero_state(const GridSpec& grid) {
  SimState s;
  s.n_hat.assign(grid.size(), Complex(0.0, 0.0));
  for (auto& c : s.m_hat) c.assign(grid.size(), Complex(0.0, 0.0));
  return s;
}

class ManufacturedProblem {
 public:
  ManufacturedProblem(const GridSpec& grid, const FluidParams& params)
      : grid_(grid), p_(params), fft_(grid.n) {
    // row 0 = density, 1..3 = momentum; the conjugate partner at -idx is
    // implied so the physical fields stay real.
    entries_ = {
        {0, {1, 0, 0}, Complex(5e-4, 0.0), 0},
        {0, {0, 1, -1}, Complex(0.0, 2e-4), 1},
        {1, {0, 1, 0}, Complex(4e-4, 0.0), 1},
        {2, {1, 0, 1}, Complex(0.0, -3e-4), 2},
        {3, {1, 1, 0}, Complex(2.5e-4, 1e-4), 0},
    };
    for (const Entry& e : entries_) {
      push_site(e.idx[0], e.idx[1], e.idx[2]);
      push_site(-e.idx[0], -e.idx[1], -e.idx[2]);
    }
  }

  SimState at(double t) const {
    SimState u = zero_state(grid_);
    SimState du = zero_state(grid_);
    fill(t, u, du);
    u.time = t;
    return u;
  }

  SpectralSource source() const {
    return [this](double t, std::vector<Complex>& add_n,
                  std::array<std::vector<Complex>, 3>& add_m) {
      SimState u = zero_state(grid_);
      SimState du = zero_state(grid_);
      fill(t, u, du);

      // R += dU*/dt - A U* on the populated modes.
      for (const Site& s : sites_) {
        const Vec3 xi(grid_.wavenumber(s.idx[0]), grid_.wavenumber(s.idx[1]),
                      grid_.wavenumber(s.idx[2]));
        const Mat4c a = assemble_symbol(p_, xi);
        Vec4c v;
        v << u.n_hat[s.flat], u.m_hat[0][s.flat], u.m_hat[1][s.flat], u.m_hat[2][s.flat];
        const Vec4c av = a * v;
        add_n[s.flat] += du.n_hat[s.flat] - av(0);
        for (int c = 0; c < 3; ++c)
          add_m[c][s.flat] += du.m_hat[c][s.flat] - av(c + 1);
      }

      // R -= Q(U*) everywhere (the density row of Q is identically zero).
      std::array<std::vector<Complex>, 3> qm;
      nonlinear_rhs(grid_, p_, fft_, u, 0.1, qm);
      for (int c = 0; c < 3; ++c)
        for (size_t i = 0; i < qm[c].size(); ++i) add_m[c][i] -= qm[c][i];
    };
  }

 private:
  struct Entry {
    int row;
    int idx[3];
    Complex amp;
    int shape;
  };
  struct Site {
    int idx[3];
    int flat;
  };

  static void time_shape(int shape, double t, double& f, double& fp) {
    switch (shape) {
      case 0:
        f = 1.0 + 0.5 * std::sin(1.3 * t);
        fp = 0.65 * std::cos(1.3 * t);
        break;
      case 1:
        f = std::cos(0.9 * t);
        fp = -0.9 * std::sin(0.9 * t);
        break;
      default:
        f = std::exp(-0.25 * t);
        fp = -0.25 * f;
    }
  }

  int wrap_flat(int i, int j, int k) const {
    const int n = grid_.n;
    auto w = [n](int v) { return (v % n + n) % n; };
    return grid_.flat(w(i), w(j), w(k));
  }

  void push_site(int i, int j, int k) {
    const int flat = wrap_flat(i, j, k);
    for (const Site& s : sites_)
      if (s.flat == flat) return;
    sites_.push_back({{i, j, k}, flat});
  }

  void fill(double t, SimState& u, SimState& du) const {
    for (const Entry& e : entries_) {
      double f, fp;
      time_shape(e.shape, t, f, fp);
      auto& arr = e.row == 0 ? u.n_hat : u.m_hat[e.row - 1];
      auto& darr = e.row == 0 ? du.n_hat : du.m_hat[e.row - 1];
      const int plus = wrap_flat(e.idx[0], e.idx[1], e.idx[2]);
      const int minus = wrap_flat(-e.idx[0], -e.idx[1], -e.idx[2]);
      arr[plus] += e.amp * f;
      arr[minus] += std::conj(e.amp) * f;
      darr[plus] += e.amp * fp;
      darr[minus] += std::conj(e.amp) * fp;
    }
  }

  GridSpec grid_;
  FluidParams p_;
  Fft3 fft_;
  std::vector<Entry> entries_;
  std::vector<Site> sites_;
};

// Global max error at t = T of a run against the manufactured solution.
inline double manufactured_error(const GridSpec& grid, const FluidParams& p, int scheme,
                                 double dt, double t_end) {
  ManufacturedProblem prob(grid, p);
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.scheme = scheme;
  cfg.t_end = t_end;
  cfg.series_stride = 1 << 20;
  cfg.nonlinear = true;
  const SimResult res = run_simulation(grid, p, cfg, prob.at(0.0), prob.source());
  return state_max_diff(res.final_state, prob.at(t_end));
}

}  // namespace nsplab::testfix
