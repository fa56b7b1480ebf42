#pragma once

#include <cstddef>
#include <vector>

#include "ammhl/amm_core.hpp"
#include "ammhl/hedging.hpp"
#include "ammhl/market_dynamics.hpp"
#include "ammhl/noise_flow.hpp"

namespace ammhl {

// Change in LP wealth over [0, T] split into its pathwise components.
//   total = fee_revenue + dex_value_change - risk_offsetting_pnl - cex_cost
// risk_offsetting_pnl is minus the CEX inventory gain, sum Q_i (S_{i+1} - S_i).
struct WealthRecord {
  std::size_t path = 0;
  double fee_revenue = 0.0;   // int Pi dt along the path
  double fee_realized = 0.0;  // from simulated taker arrivals
  double dex_value_change = 0.0;
  double risk_offsetting_pnl = 0.0;
  double cex_cost = 0.0;
  double total = 0.0;
  double normalized_total = 0.0;  // total / (kappa sqrt(F_0))
  double lvr_cumulative = 0.0;    // int lvr_rate dt
};

// Hedged decomposition. paths.kappa is ignored; reserves are recomputed from
// kappa. The terminal wealth is booked directly (cash from CEX trades at
// S_{i+1} plus costs eta dQ^2 / dt) and compared with the components by
// ledger_residual.
std::vector<WealthRecord> wealth_decomposition(const PathBundle& paths, const HedgePath& hedge,
                                               const FeeAccrual& fees, double kappa,
                                               const MarketModel& model, const HedgeParams& hp);

// nu = 0: the CEX position stays at q0 = -Y_0 and risk_offsetting_pnl is
// -Q_0 (F_T - F_0).
std::vector<WealthRecord> wealth_no_hedge(const PathBundle& paths, const FeeAccrual& fees,
                                          double kappa, const MarketModel& model);

// |total - (fee + dex - risk - cex)|
double ledger_residual(const WealthRecord& r);

// Instantaneous convexity cost (1/2) d11 phi (d1 h)^2 sigma^2 F^2 of the
// pool position; kappa sigma^2 sqrt(F) / 4 for the constant-product curve.
double lvr_rate(double f, double kappa, double sigma, const Curve& curve);
double lvr_rate(double f, double kappa, double sigma);

struct SampleStats {
  double mean = 0.0;
  double se = 0.0;
  double sd = 0.0;
};

SampleStats sample_stats(const std::vector<double>& v);

}  // namespace ammhl
