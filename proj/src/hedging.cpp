#include "ammhl/hedging.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include "ammhl/errors.hpp"

namespace ammhl {

void HedgePath::resize(std::size_t paths, std::size_t steps) {
  n_paths = paths;
  n_steps = steps;
  const std::size_t total = paths * (steps + 1);
  nu.assign(total, 0.0);
  q.assign(total, 0.0);
  i.assign(total, 0.0);
  z.assign(total, 0.0);
  ell.assign(total, 0.0);
}

NoTransientHedger::NoTransientHedger(const HedgeParams& hp, const MarketModel& model,
                                     const std::vector<double>& times)
    : ell_(hp, model, times) {
  if (hp.c != 0.0) fail(ErrorKind::capability, "no-transient solver requires c = 0; use the Riccati solver");
  const TrackingKernels tk(hp.tracking_rate(), model.horizon_T);
  const std::size_t n = times.size();
  p_.resize(n);
  for (std::size_t k = 0; k < n; ++k) p_[k] = tk.P(times[k]);
  decay_.resize(n > 0 ? n - 1 : 0);
  dt_.resize(decay_.size());
  w0_.resize(decay_.size());
  w1_.resize(decay_.size());
  // int Ptilde(s, t_{k+1}) ell_s ds with ell linear over the step; the plain
  // trapezoid is off by O((rate dt)^2), which matters once rate dt ~ 1
  using gl = boost::math::quadrature::gauss<double, 8>;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double t0 = times[k], t1 = times[k + 1], h = t1 - t0;
    decay_[k] = tk.Ptilde(t0, t1);
    dt_[k] = h;
    w1_[k] = gl::integrate([&](double u) { return u * tk.Ptilde(t0 + u * h, t1); }, 0.0, 1.0) * h;
    w0_[k] = gl::integrate([&](double u) { return (1.0 - u) * tk.Ptilde(t0 + u * h, t1); }, 0.0, 1.0) * h;
  }
}

void NoTransientHedger::run(const double* f, const double* a, double kappa, double q0, double* nu,
                            double* q, double* ell) const {
  const std::size_t n = p_.size();
  for (std::size_t k = 0; k < n; ++k) ell[k] = ell_.value(k, f[k], a[k], kappa);
  q[0] = q0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    nu[k] = p_[k] * q[k] + ell[k];
    q[k + 1] = decay_[k] * q[k] + w0_[k] * ell[k] + w1_[k] * ell[k + 1];
  }
  nu[n - 1] = p_[n - 1] * q[n - 1] + ell[n - 1];
}

HedgePath hedge_path_no_transient(const PathBundle& paths, double kappa, const HedgeParams& hp,
                                  const MarketModel& model, Exec exec) {
  hp.validate();
  if (hp.c != 0.0) fail(ErrorKind::capability, "hedge_path_no_transient: c != 0, wrong solver");
  if (paths.times.size() != paths.n_steps + 1) fail(ErrorKind::shape, "hedge_path_no_transient: bad time grid");
  const NoTransientHedger hedger(hp, model, paths.times);
  HedgePath out;
  out.resize(paths.n_paths, paths.n_steps);
  out.times = paths.times;
  const std::size_t m = paths.stride();

  auto body = [&](long long p) {
    const double q0 = hp.initial_inventory(kappa / std::sqrt(paths.f_row(p)[0]));
    hedger.run(paths.f_row(p), paths.a_row(p), kappa, q0, out.nu.data() + p * m,
               out.q.data() + p * m, out.ell.data() + p * m);
  };
  const auto n = static_cast<long long>(paths.n_paths);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (long long p = 0; p < n; ++p) body(p);
  } else {
    for (long long p = 0; p < n; ++p) body(p);
  }
  return out;
}

}  // namespace ammhl
