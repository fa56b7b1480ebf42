#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ammhl/market_dynamics.hpp"
#include "ammhl/parallel.hpp"

namespace ammhl {

class PathRng;

// Law of the absolute private valuation |V|, supported on [fee_pi, 1].
struct ValuationLaw {
  enum class Kind { uniform, two_point, point_mass };

  Kind kind = Kind::uniform;
  double lo = 0.003;  // = fee_pi
  double v_bar = 0.5015;
  double eps = 1e-3;  // two-point lower atom sits at lo + eps

  // Uniform[pi, 1]; v_bar = (1 + pi) / 2.
  static ValuationLaw uniform(double fee_pi);
  // {pi + eps, 1} with weights chosen so the mean is v_bar.
  static ValuationLaw two_point(double fee_pi, double v_bar, double eps = 1e-3);
  static ValuationLaw point_mass(double fee_pi, double v_bar);

  double mean() const { return v_bar; }
  double sample(PathRng& rng) const;
  void validate() const;
  std::string name() const;
};

struct FlowParams {
  double lambda = 0.0;
  double fee_pi = 0.003;
  ValuationLaw valuation = ValuationLaw::uniform(0.003);

  double v_bar() const { return valuation.mean(); }
  double gamma() const;
  void validate() const;

  // Flow with the given profitability; lambda is solved from (pi, v_bar).
  static FlowParams from_gamma(double gamma, double fee_pi,
                               ValuationLaw::Kind kind = ValuationLaw::Kind::uniform,
                               double v_bar = -1.0);
};

double lambda_for_gamma(double gamma, double fee_pi, double v_bar);

// Volume maximising the taker's criterion.
double optimal_volume(double v_abs, double f, double kappa, double fee_pi);

// Expected fee revenue rate gamma * kappa * sqrt(F).
double fee_rate(double f, double kappa, const FlowParams& flow);

// E[int_0^T Pi dt] with no signal.
double expected_fee_integral(double f0, double kappa, double gamma, double sigma, double horizon_T);

struct FeeAccrual {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<double> realized;  // cumulative, stride n_steps + 1
  std::vector<double> rate;      // cumulative trapezoid of Pi
  bool discretization_warning = false;

  const double* realized_row(std::size_t p) const { return realized.data() + p * (n_steps + 1); }
  const double* rate_row(std::size_t p) const { return rate.data() + p * (n_steps + 1); }
};

// Thinned arrivals with probability lambda * dt per step. Draws come from the
// arrival/valuation streams of (paths.seed + seed_offset, path).
FeeAccrual simulate_fee_accrual(const PathBundle& paths, const FlowParams& flow, double kappa,
                                std::uint64_t seed_offset = 0, Exec exec = Exec::parallel);

}  // namespace ammhl
