// One line per criterion: PASS/FAIL, id, name, wall time, and the failed
// checks if any. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

#include "ammhl/amm_core.hpp"
#include "ammhl/config.hpp"
#include "ammhl/csv_io.hpp"
#include "ammhl/experiments.hpp"
#include "ammhl/gateaux.hpp"
#include "ammhl/hedging.hpp"
#include "ammhl/liquidity_opt.hpp"
#include "ammhl/market_dynamics.hpp"
#include "ammhl/parallel.hpp"
#include "ammhl/riccati.hpp"
#include "ammhl/wealth.hpp"

using namespace ammhl;
namespace fs = std::filesystem;
using oracle::hp_float;

namespace {

struct Checks {
  std::vector<std::string> failed;
  void expect(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

SimGrid grid(std::size_t paths, std::size_t steps, std::uint64_t seed) {
  SimGrid g;
  g.n_paths = paths;
  g.n_steps = steps;
  g.seed = seed;
  return g;
}

void amm_algebra(Checks& c) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> logu(-3.0, 3.0), frac(1e-4, 0.3);
  PoolSpec pool;
  pool.fee_pi = 0.0;
  int bad_identity = 0, bad_round = 0, bad_order = 0, bad_second = 0;
  for (int n = 0; n < 1000; ++n) {
    const double kappa = std::exp(logu(rng)), f = std::exp(logu(rng));
    pool.kappa = kappa;
    const double y = reserves_from_price(f, kappa);
    if (std::abs(level_value(y, kappa) * y - kappa * kappa) > 1e-12 * kappa * kappa) ++bad_identity;
    if (std::abs(marginal_price(y, kappa) - f) > 1e-12 * f) ++bad_round;
    const double u = frac(rng), d = u * y;
    const double buy = exec_price_buy(d, y, pool, f), sell = exec_price_sell(d, y, pool, f);
    if (!(sell <= f && f <= buy)) ++bad_order;
    const double eb = std::abs(buy - exec_price_buy(d, y, pool, f, ExecMode::approx)) / f;
    const double es = std::abs(sell - exec_price_sell(d, y, pool, f, ExecMode::approx)) / f;
    if (eb > 1.5 * u * u || es > 1.5 * u * u) ++bad_second;
  }
  c.expect(bad_identity == 0, "level identity failed " + std::to_string(bad_identity) + "x");
  c.expect(bad_round == 0, "price round trip failed " + std::to_string(bad_round) + "x");
  c.expect(bad_order == 0, "execution price ordering failed " + std::to_string(bad_order) + "x");
  c.expect(bad_second == 0, "second-order error bound failed " + std::to_string(bad_second) + "x");
}

void moments(Checks& c) {
  MarketModel m;
  const PathBundle b = simulate_paths(m, grid(100000, 50, 2), 1.0);
  for (double q : {-1.0, -0.5, 0.5, 1.0, 2.0}) {
    oracle::Stats s;
    for (std::size_t p = 0; p < b.n_paths; ++p) s.add(std::pow(b.f_row(p)[b.n_steps], q));
    const double target = oracle::lognormal_moment(q, 1.0, 0.1, 1.0);
    c.expect(s.within(target), "E[F_T^" + num(q) + "] = " + num(s.mean) + " vs " + num(target));
  }
  std::mt19937_64 rng(3);
  MarketModel ou = m;
  ou.sigma = 0.2;
  ou.signal = SignalModel::ou(2.0, 0.1, 0.3, 0.2);
  const oracle::OuPathSampler sampler{0.2, 2.0, 0.1, 0.3, 200};
  for (double lead : {0.25, 0.5}) {
    oracle::Stats s;
    for (int n = 0; n < 100000; ++n) s.add(1.0 / std::sqrt(sampler(1.3, 0.2, lead, rng).first));
    const double target = cond_moment(-0.5, 1.3, lead, ou, 0.2);
    c.expect(s.within(target), "OU E[F^-1/2] lead " + num(lead) + ": " + num(s.mean) + " vs " + num(target));
  }
}

void hedging(Checks& c) {
  MarketModel m;
  m.sigma = 0.2;
  m.horizon_T = 0.3;
  const FlowParams flow = FlowParams::from_gamma(0.1, 0.003);
  for (double ratio : {10.0, 1000.0}) {
    HedgeParams hp;
    hp.eta = 1e-2;
    hp.phi = ratio * hp.eta;
    const double kappa = kappa_star_closed_form_A0(m, flow, hp).kappa_star;
    const std::size_t n = 1000, np = 4000;
    const PathBundle paths = simulate_paths(m, grid(np, n, 31), kappa);
    const HedgePath h = hedge_path_no_transient(paths, kappa, hp, m);
    const GateauxStats g = gateaux_residual(h, paths, kappa, hp, m, 10);
    c.expect(g.max_abs_z() <= 3.0, "ratio " + num(ratio) + ": Gateaux |z| = " + num(g.max_abs_z()));

    double scale = 0.0;
    for (double x : h.nu) scale = std::max(scale, std::abs(x));
    std::vector<double> q(n + 1);
    auto gap = [&](auto&& bump) {
      oracle::Stats s;
      for (std::size_t p = 0; p < np; ++p) {
        const double* qs = h.q_row(p);
        const double base = oracle::hedge_criterion(paths.f_row(p), qs, paths.times, kappa, hp.eta, hp.phi);
        for (std::size_t i = 0; i <= n; ++i) q[i] = qs[i] + bump(i, p);
        s.add(base - oracle::hedge_criterion(paths.f_row(p), q.data(), paths.times, kappa, hp.eta, hp.phi));
      }
      return s;
    };
    const oracle::Stats idle = gap([&](std::size_t i, std::size_t p) { return h.q_row(p)[0] - h.q_row(p)[i]; });
    c.expect(idle.mean > 3.0 * idle.se(), "ratio " + num(ratio) + ": nu* does not beat nu = 0");
    std::mt19937_64 rng(static_cast<std::uint64_t>(ratio));
    std::normal_distribution<double> n01;
    int worse = 0;
    for (int r = 0; r < 20; ++r) {
      const double a1 = n01(rng), a2 = n01(rng), a3 = n01(rng), z = n01(rng), eps = 0.2 * scale;
      const double T = m.horizon_T;
      const oracle::Stats s = gap([&](std::size_t i, std::size_t p) {
        const double t = paths.times[i] / T;
        return eps * T * (a1 * t + a2 * std::sin(3.0 * t) + a3 * t * t + z * (paths.f_row(p)[i] - 1.0) * t);
      });
      if (s.mean < -3.0 * s.se()) ++worse;
    }
    c.expect(worse == 0, "ratio " + num(ratio) + ": " + std::to_string(worse) + " perturbations beat nu*");
  }

  double prev = INFINITY;
  for (double rate : {10.0, 100.0, 1000.0}) {
    HedgeParams hp;
    hp.eta = 1e-2;
    hp.phi = 2.0 * hp.eta * rate * rate;
    const std::size_t n = 3000;
    const PathBundle paths = simulate_paths(m, grid(1000, n, 32), 1.0);
    const HedgePath h = hedge_path_no_transient(paths, 1.0, hp, m);
    double ms = 0.0;
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
      const double d = h.q_row(p)[n] + paths.y_row(p)[n];
      ms += d * d;
    }
    ms /= static_cast<double>(paths.n_paths);
    c.expect(ms < prev, "replication error not decreasing at rate " + num(rate) + ": " + num(ms));
    prev = ms;
  }
}

void riccati(Checks& c) {
  HedgeParams hp;
  hp.eta = 0.01;
  hp.phi = 0.1;
  hp.c = 0.02;
  const RiccatiSolution sol = solve_dre(hp, 1.0, 4000);
  c.expect(sol.residual_sup <= 1e-8, "residual " + num(sol.residual_sup));
  std::vector<double> r;
  for (std::size_t n : {40, 80, 160, 320}) r.push_back(integrate_dre(hp, 1.0, n).residual_sup);
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double slope = std::log2(r[k] / r[k + 1]);
    c.expect(std::abs(slope - 4.0) <= 0.3, "convergence slope " + num(slope));
  }
  HedgeParams h0 = hp;
  h0.c = 0.0;
  const RiccatiSolution s0 = solve_dre(h0, 1.0, 4000);
  MarketModel m;
  const PathBundle paths = simulate_paths(m, grid(50, 1000, 41), 1.0);
  const HedgePath gen = assemble_fbsde_solution(s0, paths, 1.0, h0, m);
  const HedgePath ref = hedge_path_no_transient(paths, 1.0, h0, m);
  double worst = 0.0;
  for (std::size_t j = 0; j < gen.nu.size(); ++j) worst = std::max(worst, std::abs(gen.nu[j] - ref.nu[j]));
  c.expect(worst <= 1e-6, "c = 0 assembly differs from the closed form by " + num(worst));
}

void stage_one(Checks& c) {
  StageOneInputs in;
  in.flow = FlowParams::from_gamma(0.2, 0.003);
  const KappaStarA0 cf = kappa_star_closed_form_A0(in.model, in.flow, in.hp);
  const hp_float x("0.01");
  const hp_float kref = oracle::kappa_ref_hp(hp_float("0.1"), 1, hp_float("0.2"), hp_float("0.1"), 1);
  const hp_float b = oracle::frak_B_hp(0.1, 1.0, in.hp.tracking_rate());
  const hp_float cc = oracle::c_t_hp(x);
  const double kstar = static_cast<double>(kref * cc / (x * b + cc));
  c.expect(std::abs(cf.kappa_ref / static_cast<double>(kref) - 1.0) <= 1e-10, "kappa_ref " + num(cf.kappa_ref));
  c.expect(std::abs(cf.kappa_star / kstar - 1.0) <= 1e-10, "kappa_star " + num(cf.kappa_star));
  if (cf.frak_B >= 0.0) c.expect(cf.kappa_star <= cf.kappa_ref, "kappa_star above kappa_ref with frak_B >= 0");
  const OptimizeResult opt = optimize_kappa_mc(in, grid(10000, 1000, 51), 21);
  const double rel = std::abs(opt.argmax - cf.kappa_star) / cf.kappa_star;
  c.expect(rel <= 0.05, "grid-search argmax " + num(opt.argmax) + " vs " + num(cf.kappa_star));
  std::printf("  kappa_ref %.10g kappa_star %.10g frak_B %.6g argmax_mc %.6g\n", cf.kappa_ref, cf.kappa_star,
              cf.frak_B, opt.argmax);
}

double kappa_star_at(ExperimentConfig cfg, const std::string& key, double v) {
  cfg.set(key, format_double(v));
  return solve_stage_one(cfg.resolve()).kappa_star;
}

void comparative_statics(Checks& c) {
  const ExperimentConfig base;
  auto monotone = [&](const std::string& key, std::vector<double> values, int sign) {
    std::vector<double> k;
    for (double v : values) k.push_back(kappa_star_at(base, key, v));
    for (std::size_t j = 1; j < k.size(); ++j)
      c.expect(sign * (k[j] - k[j - 1]) > 0.0, key + " step " + std::to_string(j) + ": " + num(k[j - 1]) +
                                                   " -> " + num(k[j]));
  };
  monotone("hedge.ratio", {1, 3, 10, 30, 100}, -1);
  monotone("market.sigma", {0.05, 0.1, 0.15, 0.2, 0.3}, -1);
  monotone("flow.gamma", {0.05, 0.1, 0.2, 0.3, 0.5}, +1);

  for (double ratio : {0.01, 1.0, 100.0}) {
    ExperimentConfig s;
    s.set("market.sigma", "0.2");
    s.set("hedge.eta", "1e-6");
    s.set("hedge.ratio", format_double(ratio));
    s.set("market.signal", "constant");
    s.set("grid.n_paths", "2000");
    s.set("grid.n_steps", "500");
    const double k0 = kappa_star_at(s, "market.signal_a", 0.0);
    for (double a : {0.02, 0.05})
      c.expect(kappa_star_at(s, "market.signal_a", a) > k0, "ratio " + num(ratio) + ": small a = " + num(a));
    for (double a : {-1.0, 1.0})
      c.expect(kappa_star_at(s, "market.signal_a", a) < k0, "ratio " + num(ratio) + ": large a = " + num(a));
  }
}

ExperimentConfig fig4(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.set("flow.gamma", "0.25");
  cfg.set("grid.n_paths", "2000");
  cfg.set("grid.n_steps", "1000");
  cfg.set("sweep.kind", "distribution");
  cfg.set("outputs.dir", out.string());
  return cfg;
}

const fs::path kRoot = fs::temp_directory_path() / "ammhl_acceptance";

void distribution(Checks& c) {
  const ResolvedConfig cfg = fig4(kRoot / "fig4").resolve();
  const Distribution d = run_distribution(cfg);
  c.expect(d.hedged.size() == 2000 && d.unhedged.size() == 2000, "record count");
  double worst = 0.0;
  oracle::Stats dex, lvr;
  for (const WealthRecord& r : d.hedged) {
    worst = std::max(worst, ledger_residual(r));
    dex.add(r.dex_value_change);
    lvr.add(r.lvr_cumulative);
  }
  // ledger tolerance relative to the initial cash position
  c.expect(worst <= 1e-10 * std::max(1.0, d.kappa_hedge), "ledger residual " + num(worst));
  const double target = 2.0 * d.kappa_hedge * (std::exp(-0.01 / 8.0) - 1.0);
  c.expect(dex.within(target), "mean DEX change " + num(dex.mean) + " vs " + num(target));
  c.expect(lvr.within(-target), "mean LVR " + num(lvr.mean) + " vs " + num(-target));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Checks& c) {
  const int saved = thread_count();
  std::vector<std::string> files;
  for (int t : {1, 4}) {
    set_thread_count(t);
    ExperimentConfig cfg = fig4(kRoot / ("threads_" + std::to_string(t)));
    for (const std::string& f : run_figure_sweep(cfg)) files.push_back(slurp(f));
    cfg.set("sweep.kind", "paths");
    cfg.set("grid.n_paths", "5");
    for (const std::string& f : run_figure_sweep(cfg)) files.push_back(slurp(f));
  }
  set_thread_count(saved);
  const std::size_t half = files.size() / 2;
  c.expect(half > 0 && files.size() == 2 * half, "unexpected file count");
  for (std::size_t k = 0; k < half; ++k) c.expect(files[k] == files[k + half], "file " + std::to_string(k) + " differs");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Checks&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "amm_algebra", 5, amm_algebra},
      {2, "moment_oracles", 60, moments},
      {3, "hedging_optimality", 180, hedging},
      {4, "riccati_consistency", 30, riccati},
      {5, "stage_one_equilibrium", 300, stage_one},
      {6, "comparative_statics", 1800, comparative_statics},
      {7, "distribution_run", 300, distribution},
      {8, "determinism", 600, determinism},
  };
  fs::remove_all(kRoot);
  int failures = 0;
  for (const Criterion& cr : criteria) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.failed.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs <= cr.budget_s, "runtime " + num(secs) + " s over budget " + num(cr.budget_s) + " s");
    const bool ok = c.failed.empty();
    failures += ok ? 0 : 1;
    std::printf("%s %d %s %.1fs\n", ok ? "PASS" : "FAIL", cr.id, cr.name, secs);
    for (const std::string& f : c.failed) std::printf("  - %s\n", f.c_str());
    std::fflush(stdout);
  }
  return failures;
}
