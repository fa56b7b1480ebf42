#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ammhl/market_dynamics.hpp"
#include "ammhl/parallel.hpp"

namespace ammhl {

struct HedgeParams {
  double eta = 1e-2;
  double phi = 0.1;
  double c = 0.0;
  double beta_res = 1.0;
  std::optional<double> q0;  // unset: start at -Y_0

  double tracking_rate() const;  // sqrt(phi / (2 eta))
  bool impact_bounded() const;   // c < sqrt(2 eta phi)
  void validate() const;
  double initial_inventory(double y0) const { return q0 ? *q0 : -y0; }
};

// Closed-form tracking kernels with b = sqrt(phi / 2 eta):
//   P(t) = b tanh(b (t - T)),  Ptilde(s, t) = cosh(b (t - T)) / cosh(b (s - T)).
class TrackingKernels {
 public:
  TrackingKernels(double rate, double horizon_T);

  double rate() const { return rate_; }
  double horizon() const { return T_; }

  double P(double t) const;
  double Ptilde(double s, double t) const;
  // log cosh(b x), safe for large b|x|
  double log_cosh(double x) const;
  // int_t^T Ptilde(t, u) e^{k (u - t)} du
  double G(double t, double k) const;

 private:
  double rate_;
  double T_;
};

TrackingKernels tracking_kernels(const HedgeParams& hp, double horizon_T);

// The no-impact forcing term on a fixed time grid,
//   ell_t = (1 / 2 eta) E[ int_t^T Ptilde(t, s) (A_s F_s - phi Y_s) ds | F_t ],
// written as kappa * C(t, A_t) * F_t^{-1/2} + D(t, A_t) * F_t.
// Zero and constant signals have closed forms; the OU signal uses composite
// Gauss-Legendre nodes tabulated once per grid time.
class EllKernel {
 public:
  EllKernel(const HedgeParams& hp, const MarketModel& model, std::vector<double> times);

  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }

  double c_coef(std::size_t i, double a) const;
  double d_coef(std::size_t i, double a) const;
  double value(std::size_t i, double f, double a, double kappa) const {
    return kappa * c_coef(i, a) / std::sqrt(f) + d_coef(i, a) * f;
  }

 private:
  struct Node {
    double weight;  // quadrature weight times Ptilde(t, s)
    double w;       // (1 - e^{-theta (s - t)}) / theta
    double h_c;     // a-free factor of E[F_s^{-1/2}] / F_t^{-1/2}
    double h_d;     // a-free factor of E[F_s] / F_t
    double d0, d1;  // E[A_s] + Cov(A_s, X) = d0 + d1 a_t
  };

  bool ou_ = false;
  std::vector<double> times_;
  std::vector<double> c_;  // deterministic coefficients (zero/constant)
  std::vector<double> d_;
  std::vector<std::size_t> offsets_;  // OU node table per time
  std::vector<Node> nodes_;
  double scale_c_ = 0.0;  // -phi / 2 eta
  double scale_d_ = 0.0;  // 1 / 2 eta
};

double ell_no_transient(double t, double f_t, double a_t, double kappa, const HedgeParams& hp,
                        const MarketModel& model);

// Row-major like PathBundle (stride n_steps + 1).
struct HedgePath {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<double> times;
  std::vector<double> nu;
  std::vector<double> q;
  std::vector<double> i;
  std::vector<double> z;
  std::vector<double> ell;

  std::size_t stride() const { return n_steps + 1; }
  void resize(std::size_t paths, std::size_t steps);
  const double* nu_row(std::size_t p) const { return nu.data() + p * stride(); }
  const double* q_row(std::size_t p) const { return q.data() + p * stride(); }
  const double* i_row(std::size_t p) const { return i.data() + p * stride(); }
  const double* z_row(std::size_t p) const { return z.data() + p * stride(); }
  const double* ell_row(std::size_t p) const { return ell.data() + p * stride(); }
};

// Pathwise c = 0 solver: nu = P Q + ell with
//   Q_{i+1} = Ptilde(t_i, t_{i+1}) Q_i + int_{t_i}^{t_{i+1}} Ptilde(s, t_{i+1}) ell_s ds,
// ell interpolated linearly over the step.
class NoTransientHedger {
 public:
  NoTransientHedger(const HedgeParams& hp, const MarketModel& model, const std::vector<double>& times);

  // f, a, nu, q, ell: times.size() entries.
  void run(const double* f, const double* a, double kappa, double q0, double* nu, double* q,
           double* ell) const;

  const EllKernel& kernel() const { return ell_; }

 private:
  EllKernel ell_;
  std::vector<double> p_;       // P(t_i)
  std::vector<double> decay_;   // Ptilde(t_i, t_{i+1})
  std::vector<double> w0_, w1_;  // weights of ell_i, ell_{i+1}
  std::vector<double> dt_;
};

HedgePath hedge_path_no_transient(const PathBundle& paths, double kappa, const HedgeParams& hp,
                                  const MarketModel& model, Exec exec = Exec::parallel);

}  // namespace ammhl
