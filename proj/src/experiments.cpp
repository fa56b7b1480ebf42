#include "ammhl/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>

#include "ammhl/csv_io.hpp"
#include "ammhl/errors.hpp"
#include "ammhl/riccati.hpp"
#include "ammhl/version.hpp"

namespace ammhl {

namespace fs = std::filesystem;

StageOneInputs stage_one_inputs(const ResolvedConfig& cfg) {
  StageOneInputs in;
  in.model = cfg.market;
  in.hp = cfg.hedge;
  in.flow = cfg.flow;
  in.kappa_max = cfg.kappa_max;
  in.dre_mesh_n = cfg.dre_mesh_n;
  return in;
}

StageOneResult solve_stage_one(const ResolvedConfig& cfg, Exec exec) {
  StageOneInputs in = stage_one_inputs(cfg);
  in.validate();
  const bool zero = cfg.market.signal.kind == SignalModel::Kind::zero;
  StageOneResult res;
  if (cfg.hedge.c == 0.0 && !zero) {
    res = kappa_star_with_signal(in, cfg.grid, exec);
  } else {
    res.inputs = in;
    res.grid = cfg.grid;
    res.numerator_N = numerator_N(in.model, in.flow.gamma());
    res.deviation_E = deviation_E(in.model);
    if (zero) {
      const KappaRef ref = kappa_ref_closed_form(in.model, in.flow, in.hp.phi);
      res.kappa_ref = ref.kappa_ref;
      res.shutdown = ref.shutdown;
    } else if (res.numerator_N > 0.0) {
      res.kappa_ref = res.numerator_N / (in.hp.phi * res.deviation_E);
    } else {
      res.shutdown = true;
    }
    if (cfg.hedge.c == 0.0) {
      const KappaStarA0 ks = kappa_star_closed_form_A0(in.model, in.flow, in.hp);
      res.kappa_star = ks.kappa_star;
      if (in.kappa_max > 0.0) res.kappa_star = std::min(res.kappa_star, in.kappa_max);
      res.frak_B = ks.frak_B;
      res.scaling = ks.scaling;
    }
  }

  const std::size_t n_grid = cfg.kappa_grid_n > 0 ? cfg.kappa_grid_n : (cfg.hedge.c > 0.0 ? 21 : 0);
  if (n_grid > 0) {
    if (in.kappa_max <= 0.0) {
      const double base = std::max(res.kappa_ref, res.kappa_star);
      in.kappa_max = base > 0.0 ? 2.0 * base : 1.0;
    }
    const OptimizeResult opt = optimize_kappa_mc(in, cfg.grid, n_grid, exec);
    res.mc_value_curve = opt.curve;
    res.argmax_mc = opt.argmax;
    res.argmax_boundary = opt.boundary;
    if (cfg.hedge.c > 0.0) {
      res.kappa_star = opt.argmax;
      res.scaling = res.kappa_ref > 0.0 ? res.kappa_star / res.kappa_ref : 0.0;
    }
  }
  res.inputs = stage_one_inputs(cfg);
  return res;
}

double resolve_kappa(const ResolvedConfig& cfg, Exec exec) {
  if (cfg.kappa > 0.0) return cfg.kappa;
  ResolvedConfig c = cfg;
  c.kappa_grid_n = 0;
  const StageOneResult r = solve_stage_one(c, exec);
  if (!(r.kappa_star > 0.0))
    fail(ErrorKind::domain, "equilibrium depth is zero (market shuts down); set market.kappa");
  return r.kappa_star;
}

HedgePath optimal_hedge(const PathBundle& paths, double kappa, const ResolvedConfig& cfg, Exec exec) {
  if (cfg.hedge.c == 0.0) return hedge_path_no_transient(paths, kappa, cfg.hedge, cfg.market, exec);
  const RiccatiSolution dre = solve_dre(cfg.hedge, cfg.market.horizon_T, cfg.dre_mesh_n);
  return assemble_fbsde_solution(dre, paths, kappa, cfg.hedge, cfg.market, exec);
}

Distribution run_distribution(const ResolvedConfig& cfg, Exec exec) {
  Distribution d;
  if (cfg.kappa > 0.0) {
    d.kappa_hedge = d.kappa_nohedge = cfg.kappa;
  } else {
    ResolvedConfig c = cfg;
    c.kappa_grid_n = 0;
    const StageOneResult r = solve_stage_one(c, exec);
    if (!(r.kappa_star > 0.0) || !(r.kappa_ref > 0.0))
      fail(ErrorKind::domain, "equilibrium depth is zero (market shuts down); set market.kappa");
    d.kappa_hedge = r.kappa_star;
    d.kappa_nohedge = r.kappa_ref;
  }
  const PathBundle paths = simulate_paths(cfg.market, cfg.grid, d.kappa_hedge, exec);
  const HedgePath hedge = optimal_hedge(paths, d.kappa_hedge, cfg, exec);
  const FeeAccrual fees = simulate_fee_accrual(paths, cfg.flow, d.kappa_hedge, 0, exec);
  d.hedged = wealth_decomposition(paths, hedge, fees, d.kappa_hedge, cfg.market, cfg.hedge);
  const FeeAccrual fees_ref = simulate_fee_accrual(paths, cfg.flow, d.kappa_nohedge, 0, exec);
  d.unhedged = wealth_no_hedge(paths, fees_ref, d.kappa_nohedge, cfg.market);
  return d;
}

nlohmann::json to_json(const ResolvedConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const std::string& line : describe(cfg)) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

nlohmann::json to_json(const StageOneResult& r) {
  nlohmann::json j;
  j["version"] = kVersion;
  const StageOneInputs& in = r.inputs;
  j["inputs"] = {
      {"market",
       {{"f0", in.model.f0},
        {"sigma", in.model.sigma},
        {"horizon_T", in.model.horizon_T},
        {"signal", in.model.signal.name()},
        {"signal_a", in.model.signal.a},
        {"theta", in.model.signal.theta},
        {"mu", in.model.signal.mu},
        {"xi", in.model.signal.xi},
        {"a0", in.model.signal.a0}}},
      {"hedge",
       {{"eta", in.hp.eta}, {"phi", in.hp.phi}, {"c", in.hp.c}, {"beta_res", in.hp.beta_res}}},
      {"flow",
       {{"gamma", in.flow.gamma()},
        {"lambda", in.flow.lambda},
        {"fee_pi", in.flow.fee_pi},
        {"valuation", in.flow.valuation.name()},
        {"v_bar", in.flow.v_bar()}}},
      {"grid", {{"n_steps", r.grid.n_steps}, {"n_paths", r.grid.n_paths}, {"seed", r.grid.seed}}},
      {"kappa_max", in.kappa_max},
      {"dre_mesh_n", in.dre_mesh_n}};
  j["kappa_ref"] = r.kappa_ref;
  j["kappa_star"] = r.kappa_star;
  j["scaling"] = r.scaling;
  j["frak_A"] = r.frak_A;
  j["frak_A_se"] = r.frak_A_se;
  j["frak_B"] = r.frak_B;
  j["frak_B_se"] = r.frak_B_se;
  j["deviation_E"] = r.deviation_E;
  j["numerator_N"] = r.numerator_N;
  j["shutdown"] = r.shutdown;
  nlohmann::json curve = nlohmann::json::array();
  for (const ValuePoint& v : r.mc_value_curve) curve.push_back({{"kappa", v.kappa}, {"value", v.value}, {"se", v.se}});
  j["mc_value_curve"] = curve;
  if (!r.mc_value_curve.empty()) {
    j["argmax_mc"] = r.argmax_mc;
    j["argmax_boundary"] = to_string(r.argmax_boundary);
  }
  return j;
}

nlohmann::json summary_json(const Distribution& d) {
  auto block = [](const std::vector<WealthRecord>& recs) {
    std::vector<double> total, norm, fee, dex, risk, cex, lvr;
    double worst = 0.0;
    for (const WealthRecord& r : recs) {
      total.push_back(r.total);
      norm.push_back(r.normalized_total);
      fee.push_back(r.fee_revenue);
      dex.push_back(r.dex_value_change);
      risk.push_back(r.risk_offsetting_pnl);
      cex.push_back(r.cex_cost);
      lvr.push_back(r.lvr_cumulative);
      worst = std::max(worst, ledger_residual(r));
    }
    nlohmann::json j;
    auto put = [&](const char* name, const std::vector<double>& v) {
      const SampleStats s = sample_stats(v);
      j[name] = {{"mean", s.mean}, {"se", s.se}, {"sd", s.sd}};
    };
    put("total", total);
    put("normalized_total", norm);
    put("fee_revenue", fee);
    put("dex_value_change", dex);
    put("risk_offsetting_pnl", risk);
    put("cex_cost", cex);
    put("lvr_cumulative", lvr);
    j["max_ledger_residual"] = worst;
    j["n_paths"] = recs.size();
    return j;
  };
  nlohmann::json j;
  j["version"] = kVersion;
  j["kappa_hedge"] = d.kappa_hedge;
  j["kappa_nohedge"] = d.kappa_nohedge;
  j["hedged"] = block(d.hedged);
  j["unhedged"] = block(d.unhedged);
  return j;
}

void write_paths_csv(const ResolvedConfig& cfg, const std::string& paths_file, const std::string& fees_file,
                     Exec exec) {
  const double kappa = resolve_kappa(cfg, exec);
  const PathBundle paths = simulate_paths(cfg.market, cfg.grid, kappa, exec);
  const auto comments = header_comments(describe(cfg));
  CsvWriter w(paths_file, comments, {"path", "t", "F", "A", "Y"});
  for (std::size_t p = 0; p < paths.n_paths; ++p)
    for (std::size_t i = 0; i <= paths.n_steps; ++i)
      w.row({double(p), paths.times[i], paths.f_row(p)[i], paths.a_row(p)[i], paths.y_row(p)[i]});
  w.close();
  if (fees_file.empty()) return;
  const FeeAccrual fees = simulate_fee_accrual(paths, cfg.flow, kappa, 0, exec);
  if (fees.discretization_warning)
    std::cerr << R"({"warning":"arrival probability per step exceeds 0.1; refine grid.n_steps"})" << '\n';
  CsvWriter fw(fees_file, comments, {"path", "t", "cum_fee_realized", "cum_fee_rate"});
  for (std::size_t p = 0; p < paths.n_paths; ++p)
    for (std::size_t i = 0; i <= paths.n_steps; ++i)
      fw.row({double(p), paths.times[i], fees.realized_row(p)[i], fees.rate_row(p)[i]});
  fw.close();
}

void write_hedge_csv(const ResolvedConfig& cfg, const std::string& file, Exec exec) {
  const double kappa = resolve_kappa(cfg, exec);
  const PathBundle paths = simulate_paths(cfg.market, cfg.grid, kappa, exec);
  const HedgePath h = optimal_hedge(paths, kappa, cfg, exec);
  CsvWriter w(file, header_comments(describe(cfg)), {"path", "t", "nu", "Q", "I", "Z", "ell"});
  for (std::size_t p = 0; p < h.n_paths; ++p)
    for (std::size_t i = 0; i <= h.n_steps; ++i)
      w.row({double(p), h.times[i], h.nu_row(p)[i], h.q_row(p)[i], h.i_row(p)[i], h.z_row(p)[i],
             h.ell_row(p)[i]});
  w.close();
}

void write_sample_paths_csv(const ResolvedConfig& cfg, const std::string& file, Exec exec) {
  const double kappa = resolve_kappa(cfg, exec);
  const PathBundle paths = simulate_paths(cfg.market, cfg.grid, kappa, exec);
  const HedgePath h = optimal_hedge(paths, kappa, cfg, exec);
  CsvWriter w(file, header_comments(describe(cfg)), {"path", "t", "F", "Y", "Q", "Y_value", "Q_value"});
  for (std::size_t p = 0; p < h.n_paths; ++p)
    for (std::size_t i = 0; i <= h.n_steps; ++i) {
      const double f = paths.f_row(p)[i], y = paths.y_row(p)[i], q = h.q_row(p)[i];
      w.row({double(p), h.times[i], f, y, q, y * f, q * (f + h.i_row(p)[i])});
    }
  w.close();
}

void write_distribution_csv(const ResolvedConfig& cfg, const Distribution& d, const std::string& file) {
  auto comments = header_comments(describe(cfg));
  comments.push_back("kappa_hedge=" + format_double(d.kappa_hedge));
  comments.push_back("kappa_nohedge=" + format_double(d.kappa_nohedge));
  CsvWriter w(file, comments,
              {"path", "fee_revenue", "fee_realized", "dex_value_change", "risk_offsetting_pnl", "cex_cost",
               "total", "normalized_total", "lvr_cumulative", "nohedge_fee_revenue",
               "nohedge_dex_value_change", "nohedge_cex_position", "nohedge_total",
               "nohedge_normalized_total"});
  for (std::size_t p = 0; p < d.hedged.size(); ++p) {
    const WealthRecord& h = d.hedged[p];
    const WealthRecord& u = d.unhedged[p];
    w.row({double(h.path), h.fee_revenue, h.fee_realized, h.dex_value_change, h.risk_offsetting_pnl,
           h.cex_cost, h.total, h.normalized_total, h.lvr_cumulative, u.fee_revenue, u.dex_value_change,
           u.risk_offsetting_pnl, u.total, u.normalized_total});
  }
  w.close();
}

std::vector<std::string> run_figure_sweep(const ExperimentConfig& raw, Exec exec) {
  const ResolvedConfig base = raw.resolve();
  ensure_directory(base.out_dir);
  const fs::path dir(base.out_dir);
  std::vector<std::string> written;
  const bool single = base.sweep_values.empty();
  const std::size_t n_points = single ? 1 : base.sweep_values.size();

  auto point = [&](std::size_t k) {
    if (single) return base;
    ExperimentConfig c = raw;
    c.set(base.sweep_parameter, format_double(base.sweep_values[k]));
    return c.resolve();
  };
  auto suffix = [&](const std::string& stem, std::size_t k) {
    return (dir / (single ? stem + ".csv" : stem + "_" + std::to_string(k) + ".csv")).string();
  };
  auto skip = [&](std::size_t k, const Error& e) {
    nlohmann::json j = {{"skipped_point", k}, {"kind", to_string(e.kind())}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
  };

  if (base.sweep_kind == "liquidity" || base.sweep_kind == "signal") {
    const std::string file = (dir / (base.sweep_kind + ".csv")).string();
    auto comments = header_comments(describe(base));
    CsvWriter w(file, comments,
                {"value", "kappa_ref", "kappa_star", "scaling", "frak_A", "frak_A_se", "frak_B", "frak_B_se",
                 "shutdown", "argmax_mc"});
    for (std::size_t k = 0; k < n_points; ++k) {
      try {
        const ResolvedConfig c = point(k);
        const StageOneResult r = solve_stage_one(c, exec);
        const double v = single ? 0.0 : base.sweep_values[k];
        w.row({v, r.kappa_ref, r.kappa_star, r.scaling, r.frak_A, r.frak_A_se, r.frak_B, r.frak_B_se,
               r.shutdown ? 1.0 : 0.0, r.argmax_mc});
        if (base.sweep_kind == "signal" && r.kappa_star > 0.0 && r.kappa_ref > 0.0) {
          ResolvedConfig cd = c;
          const std::string dfile = suffix("signal_distribution", k);
          Distribution d;
          d.kappa_hedge = r.kappa_star;
          d.kappa_nohedge = r.kappa_ref;
          if (cd.kappa > 0.0) d.kappa_hedge = d.kappa_nohedge = cd.kappa;
          const PathBundle paths = simulate_paths(cd.market, cd.grid, d.kappa_hedge, exec);
          const HedgePath hedge = optimal_hedge(paths, d.kappa_hedge, cd, exec);
          d.hedged = wealth_decomposition(paths, hedge, simulate_fee_accrual(paths, cd.flow, d.kappa_hedge, 0, exec),
                                          d.kappa_hedge, cd.market, cd.hedge);
          d.unhedged = wealth_no_hedge(paths, simulate_fee_accrual(paths, cd.flow, d.kappa_nohedge, 0, exec),
                                       d.kappa_nohedge, cd.market);
          write_distribution_csv(cd, d, dfile);
          written.push_back(dfile);
        }
      } catch (const Error& e) {
        if (single) throw;
        skip(k, e);
      }
    }
    w.close();
    written.insert(written.begin(), file);
    return written;
  }

  for (std::size_t k = 0; k < n_points; ++k) {
    try {
      const ResolvedConfig c = point(k);
      if (base.sweep_kind == "paths") {
        const std::string file = suffix("sample_paths", k);
        write_sample_paths_csv(c, file, exec);
        written.push_back(file);
      } else {
        const Distribution d = run_distribution(c, exec);
        const std::string file = suffix("distribution", k);
        write_distribution_csv(c, d, file);
        written.push_back(file);
        if (c.json) {
          const std::string side = file.substr(0, file.size() - 4) + ".json";
          write_text(side, summary_json(d).dump(2) + "\n");
          written.push_back(side);
        }
      }
    } catch (const Error& e) {
      if (single) throw;
      skip(k, e);
    }
  }
  return written;
}

}  // namespace ammhl
