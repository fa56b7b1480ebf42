#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <functional>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "ammhl/errors.hpp"
#include "ammhl/gateaux.hpp"
#include "ammhl/hedging.hpp"
#include "ammhl/rng.hpp"

using namespace ammhl;

namespace {

MarketModel fig1() { return MarketModel{}; }

SimGrid small_grid(std::size_t paths, std::size_t steps, std::uint64_t seed = 11) {
  SimGrid g;
  g.n_paths = paths;
  g.n_steps = steps;
  g.seed = seed;
  return g;
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_SUITE("hedging") {
  TEST_CASE("tracking kernels") {
    HedgeParams hp;
    hp.eta = 0.5;
    hp.phi = 1.0;  // phi / 2 eta = 1
    const TrackingKernels k = tracking_kernels(hp, 1.0);
    CHECK(k.rate() == doctest::Approx(1.0));
    CHECK(k.P(1.0) == 0.0);
    CHECK(k.P(0.0) == doctest::Approx(-0.76159415595576488812).epsilon(1e-15));
    for (double t : {0.0, 0.3, 0.99}) CHECK(k.Ptilde(t, t) == doctest::Approx(1.0).epsilon(1e-15));
    for (double s : {0.0, 0.2})
      for (double u : {0.4, 0.5})
        for (double t : {0.7, 1.0}) {
          CHECK(k.Ptilde(s, u) * k.Ptilde(u, t) == doctest::Approx(k.Ptilde(s, t)).epsilon(1e-12));
          CHECK(k.Ptilde(s, t) > 0.0);
          CHECK(k.Ptilde(s, t) <= 1.0);
        }

    // large rates stay finite
    HedgeParams big;
    big.eta = 1e-6;
    big.phi = 2.0;  // rate 1000
    const TrackingKernels kb = tracking_kernels(big, 1.0);
    CHECK(std::isfinite(kb.Ptilde(0.0, 0.5)));
    CHECK(kb.Ptilde(0.0, 0.5) == doctest::Approx(std::exp(-500.0)).epsilon(1e-6));
    CHECK(kb.P(0.0) == doctest::Approx(-1000.0));
    CHECK(kb.Ptilde(0.0, 0.5) * kb.Ptilde(0.5, 1.0) == doctest::Approx(kb.Ptilde(0.0, 1.0)).epsilon(1e-12));

    // G(t, k) = int_t^T Ptilde(t, u) e^{k (u - t)} du
    const double b = k.rate();
    for (double kk : {0.0, 0.00375, -0.7}) {
      const double ref = gk([&](double u) { return std::cosh(b * (u - 1.0)) / std::cosh(b * (0.2 - 1.0)) *
                                                   std::exp(kk * (u - 0.2)); },
                            0.2, 1.0);
      CHECK(k.G(0.2, kk) == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  TEST_CASE("ell closed form and nested simulation") {
    HedgeParams hp;  // eta 0.01, phi 0.1
    const MarketModel m = fig1();
    CHECK(ell_no_transient(1.0, 1.3, 0.0, 1.0, hp, m) == 0.0);
    HedgeParams tiny = hp;
    tiny.phi = 1e-14;
    CHECK(std::abs(ell_no_transient(0.0, 1.0, 0.0, 1.0, tiny, m)) < 1e-10);

    // -b^2 kappa F^{-1/2} g(0)
    const double b = hp.tracking_rate(), s2 = m.sigma * m.sigma;
    const double g0 = gk([&](double u) { return std::cosh(b * (u - 1.0)) * std::exp(3.0 * s2 * u / 8.0); }, 0.0, 1.0) /
                      std::cosh(b);
    const double closed = -b * b * g0;
    const double ell = ell_no_transient(0.0, 1.0, 0.0, 1.0, hp, m);
    CHECK(ell == doctest::Approx(closed).epsilon(1e-10));
    CHECK(ell_no_transient(0.0, 4.0, 0.0, 1.0, hp, m) == doctest::Approx(closed / 2.0).epsilon(1e-10));

    // nested: (1/2 eta) int Ptilde(0, s) (-phi Y_s) ds along exact GBM paths
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    const int steps = 1000;
    const double h = 1.0 / steps;
    oracle::Stats st;
    std::vector<double> w(steps + 1);
    for (int i = 0; i <= steps; ++i) w[i] = std::cosh(b * (i * h - 1.0)) / std::cosh(b) * (i == 0 || i == steps ? 0.5 : 1.0) * h;
    for (int p = 0; p < 20000; ++p) {
      double lf = 0.0, acc = w[0];
      for (int i = 1; i <= steps; ++i) {
        lf += -0.5 * s2 * h + m.sigma * std::sqrt(h) * n01(rng);
        acc += w[i] * std::exp(-0.5 * lf);
      }
      st.add(-hp.phi / (2.0 * hp.eta) * acc);
    }
    CHECK(st.within(ell));
  }

  TEST_CASE("null problem") {
    HedgeParams hp;
    hp.phi = 1e-300;
    hp.q0 = 0.0;
    MarketModel m = fig1();
    const PathBundle paths = simulate_paths(m, small_grid(5, 100), 1.0);
    const HedgePath h = hedge_path_no_transient(paths, 0.0, hp, m);
    for (double x : h.nu) CHECK(x == 0.0);
    for (double x : h.q) CHECK(x == 0.0);
  }

  TEST_CASE("capability") {
    HedgeParams hp;
    hp.c = 0.01;
    MarketModel m = fig1();
    const PathBundle paths = simulate_paths(m, small_grid(2, 10), 1.0);
    try {
      hedge_path_no_transient(paths, 1.0, hp, m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capability);
    }
    MarketModel ou = m;
    ou.signal = SignalModel::ou(2.0, 0.0, 0.1, 0.05);
    const PathBundle pou = simulate_paths(ou, small_grid(2, 10), 1.0);
    HedgeParams ok;
    const HedgePath h = hedge_path_no_transient(pou, 1.0, ok, ou);
    try {
      gateaux_residual(h, pou, 1.0, ok, ou, 2);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capability);
    }
  }

  TEST_CASE("inventory is the trapezoid integral of the rate") {
    HedgeParams hp;
    MarketModel m = fig1();
    m.signal = SignalModel::constant(0.05);
    const PathBundle paths = simulate_paths(m, small_grid(3, 400), 1.0);
    const HedgePath h = hedge_path_no_transient(paths, 1.0, hp, m);
    for (std::size_t p = 0; p < 3; ++p) {
      CHECK(h.q_row(p)[0] == doctest::Approx(-paths.y_row(p)[0]));
      double q = h.q_row(p)[0], worst = 0.0;
      for (std::size_t i = 0; i < 400; ++i) {
        q += 0.5 * (paths.times[i + 1] - paths.times[i]) * (h.nu_row(p)[i] + h.nu_row(p)[i + 1]);
        worst = std::max(worst, std::abs(q - h.q_row(p)[i + 1]));
      }
      CHECK(worst < 1e-4);
      CHECK(h.ell_row(p)[400] == 0.0);
    }
  }

  TEST_CASE("replication limit") {
    MarketModel m = fig1();
    // rate dt must stay well below one at the largest rate
    const std::size_t n = 10000;
    const PathBundle paths = simulate_paths(m, small_grid(1000, n), 1.0);
    double prev = INFINITY;
    for (double rate : {10.0, 100.0, 1000.0}) {
      HedgeParams hp;
      hp.eta = 1e-2;
      hp.phi = 2.0 * hp.eta * rate * rate;
      const HedgePath h = hedge_path_no_transient(paths, 1.0, hp, m);
      double ms = 0.0;
      for (std::size_t p = 0; p < paths.n_paths; ++p) {
        const double d = h.q_row(p)[n] + paths.y_row(p)[n];
        ms += d * d;
      }
      ms /= paths.n_paths;
      CHECK(ms < prev);
      prev = ms;
    }
    CHECK(prev < 1e-5);
  }

  TEST_CASE("optimal strategy beats perturbations") {
    HedgeParams hp;
    hp.phi = 10.0;
    MarketModel m = fig1();
    const std::size_t n = 250, np = 4000;
    const PathBundle paths = simulate_paths(m, small_grid(np, n, 5), 1.0);
    const HedgePath h = hedge_path_no_transient(paths, 1.0, hp, m);
    double scale = 0.0;
    for (double x : h.nu) scale = std::max(scale, std::abs(x));

    std::mt19937_64 rng(99);
    std::normal_distribution<double> n01;
    std::vector<double> q(n + 1);
    auto criterion_gap = [&](auto&& bump) {
      oracle::Stats s;
      for (std::size_t p = 0; p < np; ++p) {
        const double* qs = h.q_row(p);
        const double base = oracle::hedge_criterion(paths.f_row(p), qs, paths.times, 1.0, hp.eta, hp.phi);
        for (std::size_t i = 0; i <= n; ++i) q[i] = qs[i] + bump(i, p);
        s.add(base - oracle::hedge_criterion(paths.f_row(p), q.data(), paths.times, 1.0, hp.eta, hp.phi));
      }
      return s;
    };
    // nu = 0: stay at q0
    const oracle::Stats zero = criterion_gap([&](std::size_t i, std::size_t p) { return h.q_row(p)[0] - h.q_row(p)[i]; });
    CHECK(zero.mean > 3.0 * zero.se());

    for (int r = 0; r < 20; ++r) {
      // smooth random direction; Q perturbation vanishes at 0
      const double a1 = n01(rng), a2 = n01(rng), a3 = n01(rng), z = n01(rng);
      const double eps = 0.2 * scale;
      const oracle::Stats s = criterion_gap([&](std::size_t i, std::size_t p) {
        const double t = paths.times[i];
        const double path_term = z * (paths.f_row(p)[i] - 1.0);
        return eps * (a1 * t + a2 * std::sin(3.0 * t) + a3 * t * t + path_term * t);
      });
      CHECK(s.mean >= -3.0 * s.se());
    }
  }

  TEST_CASE("first-order condition") {
    HedgeParams hp;
    MarketModel m = fig1();
    const std::size_t n = 1000;
    const PathBundle paths = simulate_paths(m, small_grid(4000, n, 21), 1.0);
    const HedgePath h = hedge_path_no_transient(paths, 1.0, hp, m);
    const GateauxStats at_opt = gateaux_residual(h, paths, 1.0, hp, m, 10);
    CHECK(at_opt.max_abs_z() <= 3.0);

    // nu = 0 residual at t = 0 equals -phi E int (Y_s - Y_0) ds
    HedgePath idle;
    idle.resize(paths.n_paths, n);
    idle.times = paths.times;
    for (std::size_t p = 0; p < paths.n_paths; ++p)
      for (std::size_t i = 0; i <= n; ++i) idle.q[p * (n + 1) + i] = -paths.y_row(p)[0];
    const GateauxStats at_zero = gateaux_residual(idle, paths, 1.0, hp, m, 10);
    const double k = 3.0 * m.sigma * m.sigma / 8.0;
    const double expected = -hp.phi * (std::expm1(k) / k - 1.0);
    CHECK(at_zero.mean[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(at_zero.max_abs_z() > 3.0);

    // twice the optimum: the residual points back against nu*
    HedgePath twice = h;
    for (std::size_t p = 0; p < paths.n_paths; ++p)
      for (std::size_t i = 0; i <= n; ++i) {
        const std::size_t j = p * (n + 1) + i;
        twice.nu[j] = 2.0 * h.nu[j];
        twice.q[j] = 2.0 * h.q[j] - h.q[p * (n + 1)];
      }
    const GateauxStats at_two = gateaux_residual(twice, paths, 1.0, hp, m, 10);
    CHECK(at_two.mean[0] * h.nu_row(0)[0] < 0.0);
    CHECK(std::abs(at_two.mean[0]) > 3.0 * at_two.se[0] + 1e-12);
  }
}
