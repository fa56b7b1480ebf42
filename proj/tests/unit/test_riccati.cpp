#include <cmath>
#include <vector>

#include "doctest.h"

#include "ammhl/errors.hpp"
#include "ammhl/gateaux.hpp"
#include "ammhl/hedging.hpp"
#include "ammhl/riccati.hpp"

using namespace ammhl;

namespace {

HedgeParams impact_params(double c) {
  HedgeParams hp;
  hp.eta = 0.01;
  hp.phi = 0.1;
  hp.c = c;
  hp.beta_res = 1.0;
  return hp;
}

SimGrid grid(std::size_t paths, std::size_t steps, std::uint64_t seed) {
  SimGrid g;
  g.n_paths = paths;
  g.n_steps = steps;
  g.seed = seed;
  return g;
}

}  // namespace

TEST_SUITE("riccati") {
  TEST_CASE("terminal value and residual") {
    const HedgeParams hp = impact_params(0.02);
    const RiccatiSolution sol = solve_dre(hp, 1.0, 4000);
    CHECK(sol.mesh_n == 4000);
    const Mat2& PT = sol.P_mat.back();
    CHECK(PT(0, 0) == 0.0);
    CHECK(PT(0, 1) == 0.02 / 0.02);
    CHECK(PT(1, 0) == 0.0);
    CHECK(PT(1, 1) == 0.0);
    CHECK(sol.residual_sup <= 1e-8);
    CHECK(dre_residual_sup(sol) == sol.residual_sup);
    // the interpolant reproduces the nodes
    CHECK((sol.at(sol.grid[1234]) - sol.P_mat[1234]).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("fourth-order residual") {
    const HedgeParams hp = impact_params(0.02);
    std::vector<double> r;
    for (std::size_t n : {40, 80, 160, 320}) r.push_back(integrate_dre(hp, 1.0, n).residual_sup);
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
      const double slope = std::log2(r[k] / r[k + 1]);
      CAPTURE(slope);
      CHECK(std::abs(slope - 4.0) <= 0.3);
    }
  }

  TEST_CASE("no impact reduces to the tracking kernel") {
    const HedgeParams hp = impact_params(0.0);
    const RiccatiSolution sol = solve_dre(hp, 1.0, 4000);
    const TrackingKernels k = tracking_kernels(hp, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i <= sol.mesh_n; ++i)
      worst = std::max(worst, std::abs(sol.P_mat[i](0, 1) - k.P(sol.grid[i])));
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("assembled control matches the closed form when c = 0") {
    const HedgeParams hp = impact_params(0.0);
    for (double a : {0.0, 0.03}) {
      MarketModel m;
      if (a != 0.0) m.signal = SignalModel::constant(a);
      const PathBundle paths = simulate_paths(m, grid(20, 1000, 4), 1.0);
      const RiccatiSolution sol = solve_dre(hp, 1.0, 4000);
      const HedgePath gen = assemble_fbsde_solution(sol, paths, 1.0, hp, m);
      const HedgePath ref = hedge_path_no_transient(paths, 1.0, hp, m);
      double worst = 0.0;
      for (std::size_t j = 0; j < gen.nu.size(); ++j) worst = std::max(worst, std::abs(gen.nu[j] - ref.nu[j]));
      CAPTURE(a);
      CHECK(worst <= 1e-6);
      for (double x : gen.i) CHECK(x == 0.0);
    }
  }

  TEST_CASE("assumption on the impact scale") {
    const HedgeParams hp = impact_params(0.05);  // sqrt(2 eta phi) = 0.0447
    try {
      solve_dre(hp, 1.0, 100);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::precondition);
    }
    MarketModel m;
    m.signal = SignalModel::ou(1.0, 0.0, 0.1, 0.0);
    const RiccatiSolution sol = solve_dre(impact_params(0.02), 1.0, 400);
    const PathBundle paths = simulate_paths(m, grid(2, 10, 1), 1.0);
    try {
      assemble_fbsde_solution(sol, paths, 1.0, impact_params(0.02), m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capability);
    }
  }

  TEST_CASE("first-order condition with impact") {
    const HedgeParams hp = impact_params(0.02);
    MarketModel m;
    const PathBundle paths = simulate_paths(m, grid(4000, 1000, 8), 1.0);
    const RiccatiSolution sol = solve_dre(hp, 1.0, 4000);
    const HedgePath h = assemble_fbsde_solution(sol, paths, 1.0, hp, m);
    const GateauxStats st = gateaux_residual(h, paths, 1.0, hp, m, 10);
    CHECK(st.max_abs_z() <= 3.0);

    // impact bookkeeping and the terminal state of Z
    const double dt = paths.times[1] - paths.times[0];
    for (std::size_t p = 0; p < 3; ++p) {
      CHECK(h.i_row(p)[0] == 0.0);
      for (std::size_t i = 0; i < 1000; ++i)
        CHECK(std::abs(h.i_row(p)[i + 1] - impact_step(h.i_row(p)[i], h.nu_row(p)[i], hp.c, hp.beta_res, dt)) < 1e-6);
      CHECK(std::abs(h.z_row(p)[1000]) < 1e-12);
    }
  }
}
