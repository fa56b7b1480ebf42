#include "ammhl/wealth.hpp"

#include <cmath>

#include "ammhl/errors.hpp"

namespace ammhl {

namespace {

void check_shapes(const PathBundle& paths, const FeeAccrual& fees) {
  if (fees.n_paths != paths.n_paths || fees.n_steps != paths.n_steps)
    fail(ErrorKind::shape, "wealth: fee accrual does not match the path bundle");
  if (paths.times.size() != paths.n_steps + 1) fail(ErrorKind::shape, "wealth: bad time grid");
}

double lvr_integral(const double* f, const std::vector<double>& t, double kappa, double sigma) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    sum += 0.5 * (t[i + 1] - t[i]) * (lvr_rate(f[i], kappa, sigma) + lvr_rate(f[i + 1], kappa, sigma));
  return sum;
}

}  // namespace

double lvr_rate(double f, double kappa, double sigma, const Curve& curve) {
  if (!(f > 0.0) || !(kappa >= 0.0)) fail(ErrorKind::domain, "lvr_rate: need f > 0, kappa >= 0");
  if (kappa == 0.0 || sigma == 0.0) return 0.0;
  const double dh = curve.d1_h(f, kappa);
  return 0.5 * curve.d11_phi(curve.h(f, kappa), kappa) * dh * dh * sigma * sigma * f * f;
}

double lvr_rate(double f, double kappa, double sigma) {
  static const ConstantProduct cp;
  return lvr_rate(f, kappa, sigma, cp);
}

double ledger_residual(const WealthRecord& r) {
  return std::abs(r.total -
                  (r.fee_revenue + r.dex_value_change - r.risk_offsetting_pnl - r.cex_cost));
}

std::vector<WealthRecord> wealth_decomposition(const PathBundle& paths, const HedgePath& hedge,
                                               const FeeAccrual& fees, double kappa,
                                               const MarketModel& model, const HedgeParams& hp) {
  check_shapes(paths, fees);
  if (hedge.n_paths != paths.n_paths || hedge.n_steps != paths.n_steps)
    fail(ErrorKind::shape, "wealth: hedge path does not match the path bundle");
  if (!(kappa > 0.0)) fail(ErrorKind::domain, "wealth: kappa must be > 0");
  const std::size_t n = paths.n_steps;
  const std::vector<double>& t = paths.times;
  const double sigma = model.sigma;
  std::vector<WealthRecord> out(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    const double* f = paths.f_row(p);
    const double* q = hedge.q_row(p);
    const double* imp = hedge.i_row(p);
    auto s = [&](std::size_t i) { return f[i] + imp[i]; };
    WealthRecord& r = out[p];
    r.path = p;
    r.fee_revenue = fees.rate_row(p)[n];
    r.fee_realized = fees.realized_row(p)[n];

    const double x0 = kappa * std::sqrt(f[0]), y0 = kappa / std::sqrt(f[0]);
    const double xt = kappa * std::sqrt(f[n]), yt = kappa / std::sqrt(f[n]);
    double cash = 0.0, gain = 0.0, cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dq = q[i + 1] - q[i];
      const double c = hp.eta * dq * dq / (t[i + 1] - t[i]);
      cash -= s(i + 1) * dq + c;
      cost += c;
      gain += q[i] * (s(i + 1) - s(i));
    }
    const double initial = x0 + y0 * f[0] + q[0] * s(0);
    const double terminal = r.fee_revenue + xt + yt * f[n] + q[n] * s(n) + cash;
    r.total = terminal - initial;
    r.dex_value_change = 2.0 * kappa * (std::sqrt(f[n]) - std::sqrt(f[0]));
    r.risk_offsetting_pnl = -gain;
    r.cex_cost = cost;
    r.normalized_total = r.total / x0;
    r.lvr_cumulative = lvr_integral(f, t, kappa, sigma);
  }
  return out;
}

std::vector<WealthRecord> wealth_no_hedge(const PathBundle& paths, const FeeAccrual& fees,
                                          double kappa, const MarketModel& model) {
  check_shapes(paths, fees);
  if (!(kappa > 0.0)) fail(ErrorKind::domain, "wealth: kappa must be > 0");
  const std::size_t n = paths.n_steps;
  std::vector<WealthRecord> out(paths.n_paths);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    const double* f = paths.f_row(p);
    WealthRecord& r = out[p];
    r.path = p;
    r.fee_revenue = fees.rate_row(p)[n];
    r.fee_realized = fees.realized_row(p)[n];
    const double x0 = kappa * std::sqrt(f[0]);
    const double q0 = -kappa / std::sqrt(f[0]);
    r.dex_value_change = 2.0 * kappa * (std::sqrt(f[n]) - std::sqrt(f[0]));
    r.risk_offsetting_pnl = -q0 * (f[n] - f[0]);
    r.total = r.fee_revenue + kappa * std::sqrt(f[n]) + kappa / std::sqrt(f[n]) * f[n] + q0 * f[n] -
              (x0 + kappa / std::sqrt(f[0]) * f[0] + q0 * f[0]);
    r.normalized_total = r.total / x0;
    r.lvr_cumulative = lvr_integral(f, paths.times, kappa, model.sigma);
  }
  return out;
}

SampleStats sample_stats(const std::vector<double>& v) {
  SampleStats s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  s.se = s.sd / std::sqrt(static_cast<double>(v.size()));
  return s;
}

}  // namespace ammhl
