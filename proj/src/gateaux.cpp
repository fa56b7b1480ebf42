#include "ammhl/gateaux.hpp"

#include <algorithm>
#include <cmath>

#include "ammhl/errors.hpp"

namespace ammhl {

double GateauxStats::max_abs_z() const {
  double z = 0.0;
  for (std::size_t k = 0; k < mean.size(); ++k) {
    if (se[k] > 0.0) z = std::max(z, std::abs(mean[k]) / se[k]);
    else if (mean[k] != 0.0) z = INFINITY;
  }
  return z;
}

namespace {

// int_0^tau e^{r u} du
double exp_integral(double r, double tau) {
  const double x = r * tau;
  if (x == 0.0) return tau;
  return tau * std::expm1(x) / x;
}

}  // namespace

GateauxStats gateaux_residual(const HedgePath& hedge, const PathBundle& paths, double kappa,
                              const HedgeParams& hp, const MarketModel& model,
                              std::size_t n_checkpoints) {
  hp.validate();
  if (model.signal.kind == SignalModel::Kind::ou)
    fail(ErrorKind::capability, "gateaux_residual: OU signal not supported");
  if (hedge.n_paths != paths.n_paths || hedge.n_steps != paths.n_steps)
    fail(ErrorKind::shape, "gateaux_residual: hedge and paths differ in shape");
  if (n_checkpoints < 1 || n_checkpoints > paths.n_steps)
    fail(ErrorKind::domain, "gateaux_residual: bad checkpoint count");

  const std::size_t n = paths.n_steps, m = paths.stride();
  const double T = model.horizon_T;
  const double a = model.signal.kind == SignalModel::Kind::constant ? model.signal.a : 0.0;
  const double mrate = -0.5 * a + 0.375 * model.sigma * model.sigma;
  const double c = hp.c, b = hp.beta_res, eta = hp.eta, phi = hp.phi;

  GateauxStats st;
  for (std::size_t k = 0; k < n_checkpoints; ++k) {
    st.index.push_back(k * n / n_checkpoints);
    st.times.push_back(paths.times[st.index.back()]);
  }
  std::vector<double> samples(paths.n_paths * n_checkpoints);

  std::vector<double> s1(m), s2(m);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    const double* f = paths.f_row(p);
    const double* nu = hedge.nu_row(p);
    const double* q = hedge.q_row(p);
    const double* imp = hedge.i_row(p);
    // suffix integrals: s1 = int_t^T (c nu - b I - phi Q), s2 = -c b int_t^T e^{-b(s-t)} Q
    s1[n] = 0.0;
    s2[n] = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const double dt = paths.times[i + 1] - paths.times[i];
      const double g0 = c * nu[i] - b * imp[i] - phi * q[i];
      const double g1 = c * nu[i + 1] - b * imp[i + 1] - phi * q[i + 1];
      s1[i] = s1[i + 1] + 0.5 * dt * (g0 + g1);
      const double e = std::exp(-b * dt);
      s2[i] = e * s2[i + 1] - c * b * 0.5 * dt * (q[i] + e * q[i + 1]);
    }
    for (std::size_t k = 0; k < n_checkpoints; ++k) {
      const std::size_t i = st.index[k];
      const double tau = T - paths.times[i];
      const double y = kappa / std::sqrt(f[i]);
      double r = -2.0 * eta * nu[i] + c * (y + q[i]);
      r += a * f[i] * exp_integral(a, tau);             // E int A F
      r -= phi * y * exp_integral(mrate, tau);           // E int phi Y
      r += c * y * (mrate - b) * exp_integral(mrate - b, tau);  // c e^{bt} E int e^{-bs}(G F - b Y)
      r += s1[i] + s2[i];
      samples[p * n_checkpoints + k] = r;
    }
  }

  const double np = static_cast<double>(paths.n_paths);
  for (std::size_t k = 0; k < n_checkpoints; ++k) {
    double sum = 0.0;
    for (std::size_t p = 0; p < paths.n_paths; ++p) sum += samples[p * n_checkpoints + k];
    const double mean = sum / np;
    double ss = 0.0;
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
      const double d = samples[p * n_checkpoints + k] - mean;
      ss += d * d;
    }
    st.mean.push_back(mean);
    st.se.push_back(paths.n_paths > 1 ? std::sqrt(ss / (np - 1.0) / np) : 0.0);
  }
  return st;
}

}  // namespace ammhl
