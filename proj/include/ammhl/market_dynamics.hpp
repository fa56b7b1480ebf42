#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ammhl/parallel.hpp"

namespace ammhl {

struct SignalModel {
  enum class Kind { zero, constant, ou };

  Kind kind = Kind::zero;
  double a = 0.0;      // constant drift
  double theta = 1.0;  // OU mean reversion
  double mu = 0.0;
  double xi = 0.0;
  double a0 = 0.0;

  static SignalModel none() { return {}; }
  static SignalModel constant(double a);
  static SignalModel ou(double theta, double mu, double xi, double a0);

  double initial() const;
  void validate() const;
  std::string name() const;
};

struct MarketModel {
  double f0 = 1.0;
  double sigma = 0.1;
  double horizon_T = 1.0;
  SignalModel signal;

  // sigma = 0 is only accepted when allow_degenerate is set (tests).
  void validate(bool allow_degenerate = false) const;
};

struct SimGrid {
  std::size_t n_steps = 1000;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 20240601;

  double dt(double horizon_T) const { return horizon_T / static_cast<double>(n_steps); }
  void validate() const;
};

std::vector<double> time_grid(double horizon_T, std::size_t n_steps);

// Row-major path storage: value of path p at step i is at p * (n_steps + 1) + i.
// dw holds the n_steps Brownian increments of each path (stride n_steps).
struct PathBundle {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> f;
  std::vector<double> a;
  std::vector<double> y;
  std::vector<double> dw;

  std::size_t stride() const { return n_steps + 1; }
  const double* f_row(std::size_t p) const { return f.data() + p * stride(); }
  const double* a_row(std::size_t p) const { return a.data() + p * stride(); }
  const double* y_row(std::size_t p) const { return y.data() + p * stride(); }
  const double* dw_row(std::size_t p) const { return dw.data() + p * n_steps; }
};

// Steps one path of (F, A). The same normal draw drives the price and the OU
// signal; the signal is frozen over a step in the price exponent.
class PathSimulator {
 public:
  PathSimulator(const MarketModel& model, const SimGrid& grid);

  // f, a: n_steps + 1 entries; dw: n_steps entries or nullptr.
  void run(std::uint64_t path, double* f, double* a, double* dw) const;

  std::size_t n_steps() const { return n_steps_; }
  double dt() const { return dt_; }

 private:
  MarketModel model_;
  std::uint64_t seed_;
  std::size_t n_steps_;
  double dt_;
  double sqrt_dt_;
  double ou_decay_ = 1.0;
  double ou_scale_ = 0.0;
};

PathBundle simulate_paths(const MarketModel& model, const SimGrid& grid, double kappa,
                          Exec exec = Exec::parallel);

// Reserve drift per unit of price: dY = G F dt + dY-martingale.
double drift_G(double f, double a, double kappa, double sigma);

// Exact exponential integrator of dI = (c nu - beta I) dt with nu frozen.
double impact_step(double i, double nu, double c, double beta_res, double dt);

// Gaussian law of X = log F_s - log F_t given (F_t, A_t), and of the signal
// A_s jointly with it.
struct LogPriceMoments {
  double mean = 0.0;
  double var = 0.0;
  double signal_mean = 0.0;  // E[A_s | F_t]
  double cov = 0.0;          // Cov(A_s, X | F_t)
};

LogPriceMoments log_price_moments(double a_t, double dt_fwd, const MarketModel& model);

// E[F_s^q | F_t] with s - t = dt_fwd. a_t is the current signal value; it is
// ignored unless the signal is OU.
double cond_moment(double q, double f_t, double dt_fwd, const MarketModel& model,
                   double a_t = 0.0);

// E[A_s F_s | F_t].
double cond_signal_price_moment(double f_t, double a_t, double dt_fwd,
                                const MarketModel& model);

// OU, q = -1/2 written as f^{-1/2} exp(-a_t g) h.
double ou_g(double dt_fwd, double theta);
double ou_h(double dt_fwd, const MarketModel& model);

}  // namespace ammhl
