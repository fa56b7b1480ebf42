#include "ammhl/market_dynamics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "ammhl/errors.hpp"
#include "ammhl/rng.hpp"

namespace ammhl {

SignalModel SignalModel::constant(double a) {
  SignalModel s;
  s.kind = Kind::constant;
  s.a = a;
  return s;
}

SignalModel SignalModel::ou(double theta, double mu, double xi, double a0) {
  SignalModel s;
  s.kind = Kind::ou;
  s.theta = theta;
  s.mu = mu;
  s.xi = xi;
  s.a0 = a0;
  return s;
}

double SignalModel::initial() const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: return a;
    case Kind::ou: return a0;
  }
  return 0.0;
}

void SignalModel::validate() const {
  if (kind == Kind::constant && !std::isfinite(a)) fail(ErrorKind::domain, "signal: a must be finite");
  if (kind == Kind::ou) {
    if (!(theta > 0.0)) fail(ErrorKind::domain, "signal: OU theta must be > 0");
    if (!(xi >= 0.0)) fail(ErrorKind::domain, "signal: OU xi must be >= 0");
    if (!std::isfinite(mu) || !std::isfinite(a0)) fail(ErrorKind::domain, "signal: OU mu/a0 must be finite");
  }
}

std::string SignalModel::name() const {
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::constant: return "constant";
    case Kind::ou: return "ou";
  }
  return "unknown";
}

void MarketModel::validate(bool allow_degenerate) const {
  if (!(f0 > 0.0)) fail(ErrorKind::domain, "market: f0 must be > 0");
  if (allow_degenerate ? !(sigma >= 0.0) : !(sigma > 0.0))
    fail(ErrorKind::domain, "market: sigma must be > 0");
  if (!(horizon_T > 0.0)) fail(ErrorKind::domain, "market: horizon_T must be > 0");
  signal.validate();
}

void SimGrid::validate() const {
  if (n_steps < 1) fail(ErrorKind::domain, "grid: n_steps must be >= 1");
  if (n_paths < 1) fail(ErrorKind::domain, "grid: n_paths must be >= 1");
}

std::vector<double> time_grid(double horizon_T, std::size_t n_steps) {
  std::vector<double> t(n_steps + 1);
  const double dt = horizon_T / static_cast<double>(n_steps);
  for (std::size_t i = 0; i <= n_steps; ++i) t[i] = dt * static_cast<double>(i);
  t[n_steps] = horizon_T;
  return t;
}

PathSimulator::PathSimulator(const MarketModel& model, const SimGrid& grid)
    : model_(model), seed_(grid.seed), n_steps_(grid.n_steps) {
  model.validate(true);
  grid.validate();
  dt_ = grid.dt(model.horizon_T);
  sqrt_dt_ = std::sqrt(dt_);
  if (model.signal.kind == SignalModel::Kind::ou) {
    const double th = model.signal.theta;
    ou_decay_ = std::exp(-th * dt_);
    ou_scale_ = model.signal.xi * std::sqrt(-std::expm1(-2.0 * th * dt_) / (2.0 * th));
  }
}

void PathSimulator::run(std::uint64_t path, double* f, double* a, double* dw) const {
  PathRng rng(seed_, path, Stream::price);
  const double sigma = model_.sigma;
  const double half_var = 0.5 * sigma * sigma * dt_;
  const SignalModel& sig = model_.signal;
  const bool ou = sig.kind == SignalModel::Kind::ou;

  f[0] = model_.f0;
  a[0] = sig.initial();
  double log_f = std::log(model_.f0);
  for (std::size_t i = 0; i < n_steps_; ++i) {
    const double z = rng.normal();
    const double inc = sqrt_dt_ * z;
    if (dw) dw[i] = inc;
    log_f += a[i] * dt_ - half_var + sigma * inc;
    f[i + 1] = std::exp(log_f);
    a[i + 1] = ou ? sig.mu + (a[i] - sig.mu) * ou_decay_ + ou_scale_ * z : a[i];
  }
}

PathBundle simulate_paths(const MarketModel& model, const SimGrid& grid, double kappa,
                          Exec exec) {
  if (!(kappa > 0.0)) fail(ErrorKind::domain, "simulate_paths: kappa must be > 0");
  const PathSimulator sim(model, grid);
  PathBundle b;
  b.n_paths = grid.n_paths;
  b.n_steps = grid.n_steps;
  b.kappa = kappa;
  b.seed = grid.seed;
  b.times = time_grid(model.horizon_T, grid.n_steps);
  const std::size_t m = b.stride();
  b.f.resize(b.n_paths * m);
  b.a.resize(b.n_paths * m);
  b.y.resize(b.n_paths * m);
  b.dw.resize(b.n_paths * b.n_steps);

  const auto n = static_cast<long long>(b.n_paths);
  auto body = [&](long long p) {
    double* fr = b.f.data() + p * m;
    sim.run(static_cast<std::uint64_t>(p), fr, b.a.data() + p * m, b.dw.data() + p * b.n_steps);
    double* yr = b.y.data() + p * m;
    for (std::size_t i = 0; i < m; ++i) yr[i] = kappa / std::sqrt(fr[i]);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (long long p = 0; p < n; ++p) body(p);
  } else {
    for (long long p = 0; p < n; ++p) body(p);
  }
  return b;
}

double drift_G(double f, double a, double kappa, double sigma) {
  if (!(f > 0.0)) fail(ErrorKind::domain, "drift_G: f must be > 0");
  return kappa * (-0.5 * a + 0.375 * sigma * sigma) / (f * std::sqrt(f));
}

double impact_step(double i, double nu, double c, double beta_res, double dt) {
  const double decay = std::exp(-beta_res * dt);
  return i * decay - c * nu * std::expm1(-beta_res * dt) / beta_res;
}

namespace {

// (1 - e^{-x d}) / x, continuous at x = 0
double one_minus_exp_over(double x, double d) {
  if (x == 0.0) return d;
  return -std::expm1(-x * d) / x;
}

// Integrals of the OU noise loading over a lead time d. With u = s - r and
// psi(u) = (1 - e^{-theta u}) / theta:
//   i1 = int psi, i2 = int psi^2, i3 = int e^{-theta u} psi.
struct OuIntegrals {
  double w;   // (1 - e^{-theta d}) / theta
  double w2;  // (1 - e^{-2 theta d}) / (2 theta)
  double i1, i2, i3;
};

OuIntegrals ou_integrals(double theta, double d) {
  OuIntegrals r{};
  r.w = one_minus_exp_over(theta, d);
  r.w2 = one_minus_exp_over(2.0 * theta, d);
  if (theta * d > 1.0) {
    r.i1 = (d - r.w) / theta;
    r.i2 = (d - 2.0 * r.w + r.w2) / (theta * theta);
    r.i3 = (r.w - r.w2) / theta;
  } else {
    // closed forms cancel for small theta*d; the integrands are entire
    using boost::math::quadrature::gauss;
    auto psi = [theta](double u) { return one_minus_exp_over(theta, u); };
    r.i1 = gauss<double, 20>::integrate(psi, 0.0, d);
    r.i2 = gauss<double, 20>::integrate([&](double u) { const double v = psi(u); return v * v; }, 0.0, d);
    r.i3 = gauss<double, 20>::integrate([&](double u) { return std::exp(-theta * u) * psi(u); }, 0.0, d);
  }
  return r;
}

}  // namespace

LogPriceMoments log_price_moments(double a_t, double dt_fwd, const MarketModel& model) {
  if (!(dt_fwd >= 0.0)) fail(ErrorKind::domain, "log_price_moments: lead time must be >= 0");
  const double s2 = model.sigma * model.sigma;
  const SignalModel& sig = model.signal;
  LogPriceMoments m;
  switch (sig.kind) {
    case SignalModel::Kind::zero:
      m.mean = -0.5 * s2 * dt_fwd;
      m.var = s2 * dt_fwd;
      break;
    case SignalModel::Kind::constant:
      m.mean = (sig.a - 0.5 * s2) * dt_fwd;
      m.var = s2 * dt_fwd;
      m.signal_mean = sig.a;
      break;
    case SignalModel::Kind::ou: {
      sig.validate();
      const OuIntegrals q = ou_integrals(sig.theta, dt_fwd);
      const double xi = sig.xi, sigma = model.sigma;
      m.mean = (sig.mu - 0.5 * s2) * dt_fwd + (a_t - sig.mu) * q.w;
      // loading of X on dW_r is sigma + xi psi(s - r)
      m.var = s2 * dt_fwd + 2.0 * sigma * xi * q.i1 + xi * xi * q.i2;
      m.signal_mean = sig.mu + (a_t - sig.mu) * std::exp(-sig.theta * dt_fwd);
      m.cov = xi * sigma * q.w + xi * xi * q.i3;
      break;
    }
  }
  return m;
}

double cond_moment(double q, double f_t, double dt_fwd, const MarketModel& model, double a_t) {
  if (!(f_t > 0.0)) fail(ErrorKind::domain, "cond_moment: f_t must be > 0");
  const LogPriceMoments m = log_price_moments(a_t, dt_fwd, model);
  return std::pow(f_t, q) * std::exp(q * m.mean + 0.5 * q * q * m.var);
}

double cond_signal_price_moment(double f_t, double a_t, double dt_fwd, const MarketModel& model) {
  if (!(f_t > 0.0)) fail(ErrorKind::domain, "cond_signal_price_moment: f_t must be > 0");
  const LogPriceMoments m = log_price_moments(a_t, dt_fwd, model);
  return f_t * (m.signal_mean + m.cov) * std::exp(m.mean + 0.5 * m.var);
}

double ou_g(double dt_fwd, double theta) { return 0.5 * one_minus_exp_over(theta, dt_fwd); }

double ou_h(double dt_fwd, const MarketModel& model) {
  const SignalModel& sig = model.signal;
  if (sig.kind != SignalModel::Kind::ou) fail(ErrorKind::capability, "ou_h: signal is not OU");
  const double th = sig.theta, k = sig.xi / th, s = model.sigma;
  const double w = one_minus_exp_over(th, dt_fwd);
  const double w2 = one_minus_exp_over(2.0 * th, dt_fwd);
  // int_t^s (k + sigma - k e^{-theta (s - r)})^2 dr
  const double sq = (k + s) * (k + s) * dt_fwd - 2.0 * (k + s) * k * w + k * k * w2;
  return std::exp((-0.5 * sig.mu + 0.25 * s * s) * dt_fwd + 0.5 * sig.mu * w + sq / 8.0);
}

}  // namespace ammhl
