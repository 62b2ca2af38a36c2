#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsplab/sim.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace nsplab;
using namespace nsplab::testfix;

namespace {

GridSpec small_box() {
  GridSpec g;
  g.n = 8;
  g.box = 2.0 * kPi;
  return g;
}

}  // namespace

TEST_CASE("grid helpers and validation") {
  GridSpec g = small_box();
  CHECK(g.size() == 512);
  CHECK(g.flat(1, 2, 3) == 1 + 8 * (2 + 8 * 3));
  CHECK(g.signed_index(3) == 3);
  CHECK(g.signed_index(4) == -4);
  CHECK(g.signed_index(7) == -1);
  CHECK(g.wavenumber(-2) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(g.dealias_limit() == 2);

  GridSpec g16 = g;
  g16.n = 16;
  CHECK(g16.dealias_limit() == 5);
  GridSpec g32 = g;
  g32.n = 32;
  CHECK(g32.dealias_limit() == 10);

  GridSpec bad = g;
  bad.n = 12;
  CHECK_THROWS_WITH_AS(bad.validate(), "GridSpec: n must be a power of two in [8, 64]",
                       std::invalid_argument);
  bad.n = 128;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.box = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.dealias_fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  StepperConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = StepperConfig{};
  c.scheme = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = StepperConfig{};
  c.vacuum_floor = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = StepperConfig{};
  c.blowup_factor = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("fft round trip and plane-wave delta") {
  const GridSpec g = small_box();
  Fft3 fft(g.n);

  std::mt19937_64 rng(11u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> a(g.size());
  for (auto& z : a) z = Complex(u(rng), u(rng));
  std::vector<Complex> b = a;
  fft.to_spectral(b);
  fft.to_physical(b);
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  CHECK(worst <= 1e-13);

  // e^{i k.x} with k = (1, -2, 3) lands on exactly one coefficient.
  const int n = g.n;
  const double h = g.box / n;
  std::vector<Complex> wave(g.size());
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double phase = 1.0 * h * ix - 2.0 * h * iy + 3.0 * h * iz;
        wave[g.flat(ix, iy, iz)] = std::polar(1.0, phase);
      }
  fft.to_spectral(wave);
  const int hit = g.flat(1, n - 2, 3);
  CHECK(std::abs(wave[hit] - Complex(1.0, 0.0)) <= 1e-13);
  for (int i = 0; i < g.size(); ++i) {
    if (i == hit) continue;
    CHECK(std::abs(wave[i]) <= 1e-13);
  }
}

TEST_CASE("grid Parseval identity") {
  GridSpec g;
  g.n = 16;
  g.box = 3.7;
  Fft3 fft(g.n);

  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> f(g.size());
  for (auto& z : f) z = Complex(u(rng), 0.0);

  const double h = g.box / g.n;
  double phys = 0.0;
  for (const Complex& z : f) phys += std::norm(z);
  phys *= h * h * h;

  std::vector<Complex> fh = f;
  fft.to_spectral(fh);
  const double spec = state_l2(g, fh);
  CHECK(spec * spec == doctest::Approx(phys).epsilon(1e-12));
}

TEST_CASE("poisson solve on single modes") {
  const GridSpec g = small_box();
  FluidParams p;
  p.debye = 2.0;
  const double cpl = 0.25;

  std::vector<Complex> nh(g.size(), Complex(0.0, 0.0));
  const Complex a(0.3, -0.2), b(-0.1, 0.05);
  nh[g.flat(1, 0, 0)] = a;  // |k|^2 = 1
  nh[g.flat(0, 2, 0)] = b;  // |k|^2 = 4

  std::vector<Complex> phi;
  std::array<std::vector<Complex>, 3> e;
  poisson_solve(g, p, nh, phi, e);

  CHECK(std::abs(phi[g.flat(1, 0, 0)] - cpl * a) <= 1e-16);
  CHECK(std::abs(phi[g.flat(0, 2, 0)] - cpl * b / 4.0) <= 1e-16);
  CHECK(phi[0] == Complex(0.0, 0.0));
  CHECK(std::abs(e[0][g.flat(1, 0, 0)] - Complex(0.0, 1.0) * cpl * a) <= 1e-16);
  CHECK(std::abs(e[1][g.flat(0, 2, 0)] - Complex(0.0, 2.0) * cpl * b / 4.0) <= 1e-16);
  CHECK(std::abs(e[1][g.flat(1, 0, 0)]) == 0.0);

  nh[0] = Complex(1e-6, 0.0);
  CHECK_THROWS_WITH_AS(poisson_solve(g, p, nh, phi, e),
                       "poisson_solve: density must have zero mean", std::invalid_argument);
}

TEST_CASE("quadratic term: momentum self-advection of a single cosine") {
  // n = 0, m1 = cos(x1): the only flux is m (x) m, so
  // Q1 = -d/dx1 cos^2(x1) = sin(2 x1).
  const GridSpec g = small_box();
  const FluidParams p;
  Fft3 fft(g.n);

  SimState s = zero_state(g);
  s.m_hat[0][g.flat(1, 0, 0)] = Complex(0.5, 0.0);
  s.m_hat[0][g.flat(g.n - 1, 0, 0)] = Complex(0.5, 0.0);

  std::array<std::vector<Complex>, 3> q;
  nonlinear_rhs(g, p, fft, s, 0.5, q);

  const int plus = g.flat(2, 0, 0), minus = g.flat(g.n - 2, 0, 0);
  CHECK(std::abs(q[0][plus] - Complex(0.0, -0.5)) <= 5e-15);
  CHECK(std::abs(q[0][minus] - Complex(0.0, 0.5)) <= 5e-15);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < g.size(); ++i) {
      if (c == 0 && (i == plus || i == minus)) continue;
      CHECK(std::abs(q[c][i]) <= 5e-15);
    }
}

TEST_CASE("quadratic term: pressure and electrostatic remainders of a density mode") {
  // n = a cos(x1), m = 0, gamma = 2, c = 1, lam = 1.  The pressure
  // remainder is n^2/2 and the w-flux contributes -w1^2/2 with
  // w1 = -a sin(x1), so Q1 = -d/dx1 (a^2 cos(2 x1)/2) = a^2 sin(2 x1).
  const GridSpec g = small_box();
  const FluidParams p;
  Fft3 fft(g.n);
  const double a = 0.01;

  SimState s = zero_state(g);
  s.n_hat[g.flat(1, 0, 0)] = Complex(0.5 * a, 0.0);
  s.n_hat[g.flat(g.n - 1, 0, 0)] = Complex(0.5 * a, 0.0);

  std::array<std::vector<Complex>, 3> q;
  nonlinear_rhs(g, p, fft, s, 0.5, q);

  const int plus = g.flat(2, 0, 0), minus = g.flat(g.n - 2, 0, 0);
  CHECK(std::abs(q[0][plus] - Complex(0.0, -0.5 * a * a)) <= 1e-15);
  CHECK(std::abs(q[0][minus] - Complex(0.0, 0.5 * a * a)) <= 1e-15);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < g.size(); ++i) {
      if (c == 0 && (i == plus || i == minus)) continue;
      CHECK(std::abs(q[c][i]) <= 1e-15);
    }

  // With the coupling off only the pressure remainder survives:
  // Q1 = -d/dx1 (a^2 cos(2x1)/4 + const) = a^2 sin(2 x1)/2.
  FluidParams off = p;
  off.poisson = false;
  nonlinear_rhs(g, off, fft, s, 0.5, q);
  CHECK(std::abs(q[0][plus] - Complex(0.0, -0.25 * a * a)) <= 1e-15);
}

TEST_CASE("deterministic initial data") {
  const GridSpec g = small_box();
  Fft3 fft(g.n);

  const SimState t1 = trig_initial(g, 0.1);
  const SimState t2 = trig_initial(g, 0.01);
  const double d1 = 1.0 - min_physical_density(g, fft, t1);
  const double d2 = 1.0 - min_physical_density(g, fft, t2);
  CHECK(d1 > 0.0);
  CHECK(d1 / d2 == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(mass_defect(g, t1) == 0.0);
  CHECK(conjugate_symmetry_defect(g, t1) <= 1e-13);

  const SimState s1 = seeded_initial(g, 1e-3, 42u);
  const SimState s2 = seeded_initial(g, 1e-3, 42u);
  const SimState s3 = seeded_initial(g, 1e-3, 43u);
  CHECK(state_max_diff(s1, s2) == 0.0);
  CHECK(state_max_diff(s1, s3) > 0.0);
  CHECK(mass_defect(g, s1) == 0.0);
  CHECK(conjugate_symmetry_defect(g, s1) <= 1e-13);

  // The density amplitude is normalized to eps.
  std::vector<Complex> np = s1.n_hat;
  fft.to_physical(np);
  double amp = 0.0;
  for (const Complex& z : np) amp = std::max(amp, std::abs(z.real()));
  CHECK(amp == doctest::Approx(1e-3).epsilon(1e-10));
}

TEST_CASE("linear stepping is exact and dt-independent") {
  GridSpec g;
  g.n = 16;
  g.box = 40.0;
  const FluidParams p;
  const SimState init = trig_initial(g, 1e-2);

  const SimState exact = apply_exact_linear(g, p, init, 1.0);
  CHECK(state_max_diff(apply_exact_linear(g, p, init, 0.0), init) <= 1e-14);

  for (int scheme : {1, 2}) {
    for (double dt : {0.5, 0.1}) {
      StepperConfig cfg;
      cfg.dt = dt;
      cfg.scheme = scheme;
      cfg.t_end = 1.0;
      cfg.nonlinear = false;
      const SimResult res = run_simulation(g, p, cfg, init);
      CHECK(state_max_diff(res.final_state, exact) <= 1e-13);
    }
  }
}

TEST_CASE("transverse mode decays at the bare viscous rate") {
  const GridSpec g = small_box();
  FluidParams p;
  p.mu = 0.7;
  const double eps = 1e-2;

  // m = eps cos(x3) e1: k along z, momentum along x, div m = 0.
  SimState init = zero_state(g);
  init.m_hat[0][g.flat(0, 0, 1)] = Complex(0.5 * eps, 0.0);
  init.m_hat[0][g.flat(0, 0, g.n - 1)] = Complex(0.5 * eps, 0.0);

  StepperConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  cfg.nonlinear = false;
  const SimResult res = run_simulation(g, p, cfg, init);

  const double want = 0.5 * eps * std::exp(-p.mu * 1.0);
  const Complex got = res.final_state.m_hat[0][g.flat(0, 0, 1)];
  CHECK(std::abs(got - Complex(want, 0.0)) <= 1e-12 * want);
  CHECK(state_l2(g, res.final_state.n_hat) == 0.0);

  const double e0 = energy_diagnostic(g, p, init);
  const double e1 = energy_diagnostic(g, p, res.final_state);
  CHECK(e1 / e0 == doctest::Approx(std::exp(-2.0 * p.mu)).epsilon(1e-10));
}

TEST_CASE("zero data stays exactly zero") {
  const GridSpec g = small_box();
  const FluidParams p;
  StepperConfig cfg;
  cfg.dt = 0.25;
  cfg.t_end = 1.0;
  const SimResult res = run_simulation(g, p, cfg, zero_state(g));
  CHECK(state_max_abs(res.final_state) == 0.0);
  CHECK(res.steps == 4);
}

TEST_CASE("guards: vacuum, instability, time-grid mismatch") {
  const GridSpec g = small_box();
  const FluidParams p;

  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  try {
    run_simulation(g, p, cfg, trig_initial(g, 0.9));
    FAIL("expected the vacuum guard to trip");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("vacuum guard") != std::string::npos);
  }

  // A steady spectral source pumps the norm past the blow-up factor.
  StepperConfig grow;
  grow.dt = 0.5;
  grow.t_end = 100.0;
  grow.series_stride = 1;
  grow.nonlinear = false;
  const int site = g.flat(1, 0, 0), conj_site = g.flat(g.n - 1, 0, 0);
  SpectralSource pump = [&](double, std::vector<Complex>& add_n,
                            std::array<std::vector<Complex>, 3>&) {
    add_n[site] += Complex(0.5, 0.0);
    add_n[conj_site] += Complex(0.5, 0.0);
  };
  try {
    run_simulation(g, p, grow, trig_initial(g, 1e-3), pump);
    FAIL("expected the blow-up guard to trip");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("instability detected") != std::string::npos);
  }

  StepperConfig odd;
  odd.dt = 0.3;
  odd.t_end = 1.0;
  CHECK_THROWS_WITH_AS(run_simulation(g, p, odd, zero_state(g)),
                       "run_simulation: t_end must be a multiple of dt",
                       std::invalid_argument);
}

TEST_CASE("series bookkeeping and conserved mass") {
  const GridSpec g = small_box();
  const FluidParams p;
  StepperConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.series_stride = 4;
  const SimResult res = run_simulation(g, p, cfg, trig_initial(g, 1e-3));

  CHECK(res.steps == 10);
  REQUIRE(res.series.size() == 4);  // t = 0, 0.4, 0.8, 1.0
  CHECK(res.series.front().t == 0.0);
  CHECK(res.series.back().t == doctest::Approx(1.0).epsilon(1e-12));
  for (const SimSeriesRow& row : res.series) {
    CHECK(row.mass == 0.0);
    CHECK(row.symmetry <= 1e-12);
    CHECK(row.min_density == doctest::Approx(1.0).epsilon(0.01));
    CHECK(row.n_l2 >= 0.0);
    CHECK(row.energy > 0.0);
  }
  CHECK(mass_defect(g, res.final_state) == 0.0);
}

TEST_CASE("snapshot callback cadence") {
  const GridSpec g = small_box();
  const FluidParams p;
  StepperConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.snapshot_stride = 5;
  int calls = 0;
  double last_t = -1.0;
  run_simulation(g, p, cfg, trig_initial(g, 1e-3), nullptr,
                 [&](const SimState& s) {
                   ++calls;
                   last_t = s.time;
                 });
  CHECK(calls == 3);  // initial state plus steps 5 and 10
  CHECK(last_t == doctest::Approx(1.0).epsilon(1e-12));

  cfg.snapshot_stride = 0;
  calls = 0;
  run_simulation(g, p, cfg, trig_initial(g, 1e-3), nullptr,
                 [&](const SimState&) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("two-stage stepper is second order against a manufactured solution") {
  GridSpec g;
  g.n = 16;
  g.box = 40.0;
  const FluidParams p;

  const double coarse = manufactured_error(g, p, 2, 0.02, 1.0);
  const double fine = manufactured_error(g, p, 2, 0.01, 1.0);
  CHECK(fine > 1e-12);  // far above round-off
  CHECK(fine < 1e-6);
  const double order = std::log2(coarse / fine);
  CHECK(order > 1.8);
  CHECK(order < 2.2);

  // The one-stage variant is visibly less accurate at the same dt.
  const double euler = manufactured_error(g, p, 1, 0.02, 1.0);
  CHECK(euler > 3.0 * coarse);
}
