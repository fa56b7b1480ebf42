#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ammhl/config.hpp"
#include "ammhl/hedging.hpp"
#include "ammhl/liquidity_opt.hpp"
#include "ammhl/parallel.hpp"
#include "ammhl/wealth.hpp"

namespace ammhl {

StageOneInputs stage_one_inputs(const ResolvedConfig& cfg);

// Equilibrium depths for the configured model. Zero signal with c = 0 uses the
// closed forms, a signal with c = 0 the Monte Carlo kernel averages, and c > 0
// the grid search of the Monte Carlo criterion. A Monte Carlo value curve is
// attached whenever grid.kappa_grid_n > 0.
StageOneResult solve_stage_one(const ResolvedConfig& cfg, Exec exec = Exec::parallel);

// market.kappa when set, else the equilibrium depth with hedging.
double resolve_kappa(const ResolvedConfig& cfg, Exec exec = Exec::parallel);

// Optimal CEX strategy on every path: tanh closed form when c = 0, Riccati
// assembly otherwise.
HedgePath optimal_hedge(const PathBundle& paths, double kappa, const ResolvedConfig& cfg,
                        Exec exec = Exec::parallel);

struct Distribution {
  double kappa_hedge = 0.0;
  double kappa_nohedge = 0.0;
  std::vector<WealthRecord> hedged;
  std::vector<WealthRecord> unhedged;
};

// Hedged wealth at the hedged depth and unhedged wealth at the reference depth
// on the same price paths. market.kappa, when set, is used for both.
Distribution run_distribution(const ResolvedConfig& cfg, Exec exec = Exec::parallel);

nlohmann::json to_json(const StageOneResult& r);
nlohmann::json to_json(const ResolvedConfig& cfg);
nlohmann::json summary_json(const Distribution& d);

// path,t,F,A,Y and path,t,cum_fee_realized,cum_fee_rate
void write_paths_csv(const ResolvedConfig& cfg, const std::string& paths_file,
                     const std::string& fees_file, Exec exec = Exec::parallel);
// path,t,nu,Q,I,Z,ell
void write_hedge_csv(const ResolvedConfig& cfg, const std::string& file, Exec exec = Exec::parallel);
// path,t,F,Y,Q,Y_value,Q_value: reserves, CEX inventory and their values
void write_sample_paths_csv(const ResolvedConfig& cfg, const std::string& file,
                            Exec exec = Exec::parallel);
void write_distribution_csv(const ResolvedConfig& cfg, const Distribution& d, const std::string& file);

// Runs sweep.kind over sweep.parameter x sweep.values (a single point when the
// list is empty) and writes the CSV artifacts under outputs.dir.
std::vector<std::string> run_figure_sweep(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

}  // namespace ammhl
