#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ammhl/hedging.hpp"
#include "ammhl/market_dynamics.hpp"
#include "ammhl/noise_flow.hpp"

namespace ammhl {

struct StageOneInputs {
  MarketModel model;
  HedgeParams hp;
  FlowParams flow;
  double kappa_max = 0.0;      // budget cap; <= 0 means derive from the closed form
  std::size_t dre_mesh_n = 4000;  // used when hp.c > 0

  void validate() const;
};

// e^x - 1 - (16/3)(e^{3x/8} - 1) + x, evaluated without cancellation.
// Equals sigma^2 E[int_0^T (F_t^{-1/2} - F_0^{-1/2})^2 dt] F_0 for x = sigma^2 T.
double ct_bracket(double x);

struct KappaRef {
  double kappa_ref = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool shutdown = false;  // numerator <= 0, depth clamped to 0
};

// Depth without CEX hedging, zero signal.
KappaRef kappa_ref_closed_form(const MarketModel& model, const FlowParams& flow, double phi);
KappaRef kappa_ref_closed_form(const MarketModel& model, double gamma, double phi);

// Deterministic double integral entering the hedged depth (zero signal, c = 0).
double frak_B_zero_signal(double sigma, double horizon_T, double rate);

struct KappaStarA0 {
  double kappa_ref = 0.0;
  double kappa_star = 0.0;
  double frak_B = 0.0;
  double c_t = 0.0;
  double scaling = 0.0;
  bool shutdown = false;
};

KappaStarA0 kappa_star_closed_form_A0(const MarketModel& model, const FlowParams& flow,
                                      const HedgeParams& hp);

struct ValuePoint {
  double kappa = 0.0;
  double value = 0.0;
  double se = 0.0;
};

enum class Boundary { interior, shutdown, budget };
const char* to_string(Boundary b);

struct StageOneResult {
  StageOneInputs inputs;
  SimGrid grid;
  double kappa_ref = 0.0;
  double kappa_star = 0.0;
  double scaling = 0.0;
  double frak_A = 0.0;
  double frak_A_se = 0.0;
  double frak_B = 0.0;
  double frak_B_se = 0.0;
  double deviation_E = 0.0;  // E int (F^{-1/2} - F_0^{-1/2})^2
  double numerator_N = 0.0;  // E[gamma int F^{1/2} + 2 F_T^{1/2} - F_0^{-1/2} F_T]
  bool shutdown = false;
  std::vector<ValuePoint> mc_value_curve;
  double argmax_mc = 0.0;
  Boundary argmax_boundary = Boundary::interior;
};

// Lognormal-moment terms shared by the closed forms (any signal, by quadrature).
double numerator_N(const MarketModel& model, double gamma);
double deviation_E(const MarketModel& model);

// Hedged depth with a signal (c = 0). frak_A and frak_B are Monte Carlo
// averages along simulated kernel paths.
StageOneResult kappa_star_with_signal(const StageOneInputs& inputs, const SimGrid& grid,
                                      Exec exec = Exec::parallel);

struct McValue {
  double value = 0.0;
  double se = 0.0;
  double decomposition = 0.0;
  double decomposition_se = 0.0;
  double difference_se = 0.0;  // SE of the pathwise (direct - decomposition)
};

// Monte Carlo estimate of the stage-one criterion at each kappa, sharing one
// set of paths (common random numbers). Fees accrue at the expected rate.
std::vector<McValue> mc_objective_curve(const std::vector<double>& kappas,
                                        const StageOneInputs& inputs, const SimGrid& grid,
                                        Exec exec = Exec::parallel);
McValue mc_objective(double kappa, const StageOneInputs& inputs, const SimGrid& grid,
                     Exec exec = Exec::parallel);

struct OptimizeResult {
  std::vector<ValuePoint> curve;
  double argmax = 0.0;
  double value = 0.0;
  Boundary boundary = Boundary::interior;
};

// Grid search over [0, kappa_max] then golden-section refinement on the
// bracketing triple. eval maps a batch of depths to values.
using BatchObjective = std::function<std::vector<ValuePoint>(const std::vector<double>&)>;
OptimizeResult maximize_on_grid(const BatchObjective& eval, double kappa_max, std::size_t grid_n,
                                double rel_tol = 1e-4);

OptimizeResult optimize_kappa_mc(const StageOneInputs& inputs, const SimGrid& grid,
                                 std::size_t kappa_grid_n, Exec exec = Exec::parallel);

// Search cap when inputs.kappa_max is unset: twice the unhedged depth for the
// zero signal, four times N / (phi E) otherwise.
double default_kappa_max(const StageOneInputs& inputs);

}  // namespace ammhl
