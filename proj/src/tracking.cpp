#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ammhl/errors.hpp"
#include "ammhl/hedging.hpp"

namespace ammhl {

double HedgeParams::tracking_rate() const { return std::sqrt(phi / (2.0 * eta)); }

bool HedgeParams::impact_bounded() const { return c < std::sqrt(2.0 * eta * phi); }

void HedgeParams::validate() const {
  if (!(eta > 0.0)) fail(ErrorKind::domain, "hedge: eta must be > 0");
  if (!(phi >= 0.0)) fail(ErrorKind::domain, "hedge: phi must be >= 0");
  if (!(c >= 0.0)) fail(ErrorKind::domain, "hedge: c must be >= 0");
  if (!(beta_res > 0.0)) fail(ErrorKind::domain, "hedge: beta_res must be > 0");
  if (q0 && !std::isfinite(*q0)) fail(ErrorKind::domain, "hedge: q0 must be finite");
}

TrackingKernels::TrackingKernels(double rate, double horizon_T) : rate_(rate), T_(horizon_T) {
  if (!(rate >= 0.0)) fail(ErrorKind::domain, "tracking: rate must be >= 0");
  if (!(horizon_T > 0.0)) fail(ErrorKind::domain, "tracking: horizon must be > 0");
}

TrackingKernels tracking_kernels(const HedgeParams& hp, double horizon_T) {
  hp.validate();
  return TrackingKernels(hp.tracking_rate(), horizon_T);
}

double TrackingKernels::P(double t) const { return rate_ * std::tanh(rate_ * (t - T_)); }

double TrackingKernels::log_cosh(double x) const {
  const double u = std::abs(rate_ * x);
  return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
}

double TrackingKernels::Ptilde(double s, double t) const {
  return std::exp(log_cosh(t - T_) - log_cosh(s - T_));
}

namespace {

// (1 - e^{-a tau}) / a
double decay_integral(double a, double tau) {
  if (a == 0.0) return tau;
  return -std::expm1(-a * tau) / a;
}

}  // namespace

double TrackingKernels::G(double t, double k) const {
  const double tau = T_ - t;
  if (tau <= 0.0) return 0.0;
  const double b = rate_;
  const double num = decay_integral(b - k, tau) + std::exp(-(b - k) * tau) * decay_integral(b + k, tau);
  return num / (1.0 + std::exp(-2.0 * b * tau));
}

EllKernel::EllKernel(const HedgeParams& hp, const MarketModel& model, std::vector<double> times)
    : times_(std::move(times)) {
  hp.validate();
  model.validate(true);
  const TrackingKernels tk(hp.tracking_rate(), model.horizon_T);
  const double T = model.horizon_T;
  const double s2 = model.sigma * model.sigma;
  scale_c_ = -hp.phi / (2.0 * hp.eta);
  scale_d_ = 1.0 / (2.0 * hp.eta);
  const std::size_t n = times_.size();
  const SignalModel& sig = model.signal;

  if (sig.kind != SignalModel::Kind::ou) {
    const double a = sig.kind == SignalModel::Kind::constant ? sig.a : 0.0;
    const double m = -0.5 * a + 0.375 * s2;  // E[F_s^{-1/2}] growth rate
    c_.resize(n);
    d_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      c_[i] = scale_c_ * tk.G(times_[i], m);
      d_[i] = a == 0.0 ? 0.0 : scale_d_ * a * tk.G(times_[i], a);
    }
    return;
  }

  ou_ = true;
  using Rule = boost::math::quadrature::gauss<double, 16>;
  const auto& absc = Rule::abscissa();
  const auto& wts = Rule::weights();
  const double h0 = 0.25 / std::max({tk.rate(), sig.theta, 1.0});
  offsets_.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    offsets_[i] = nodes_.size();
    const double t = times_[i];
    double lo = t, h = h0;
    while (lo < T) {
      const double hi = std::min(lo + h, T);
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t j = 0; j < absc.size(); ++j) {
        for (int sgn : {-1, 1}) {
          const double s = mid + sgn * half * absc[j];
          const double d = s - t;
          const LogPriceMoments mom = log_price_moments(0.0, d, model);
          Node nd;
          nd.weight = half * wts[j] * tk.Ptilde(t, s);
          nd.w = -std::expm1(-sig.theta * d) / sig.theta;
          nd.h_c = std::exp(-0.5 * mom.mean + mom.var / 8.0);
          nd.h_d = std::exp(mom.mean + 0.5 * mom.var);
          nd.d0 = mom.signal_mean + mom.cov;
          nd.d1 = std::exp(-sig.theta * d);
          nodes_.push_back(nd);
        }
      }
      lo = hi;
      h *= 2.0;
    }
  }
  offsets_[n] = nodes_.size();
}

double EllKernel::c_coef(std::size_t i, double a) const {
  if (!ou_) return c_[i];
  double acc = 0.0;
  for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
    const Node& nd = nodes_[k];
    acc += nd.weight * nd.h_c * std::exp(-0.5 * a * nd.w);
  }
  return scale_c_ * acc;
}

double EllKernel::d_coef(std::size_t i, double a) const {
  if (!ou_) return d_[i];
  double acc = 0.0;
  for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
    const Node& nd = nodes_[k];
    acc += nd.weight * nd.h_d * (nd.d0 + nd.d1 * a) * std::exp(a * nd.w);
  }
  return scale_d_ * acc;
}

double ell_no_transient(double t, double f_t, double a_t, double kappa, const HedgeParams& hp,
                        const MarketModel& model) {
  if (!(f_t > 0.0)) fail(ErrorKind::domain, "ell_no_transient: f_t must be > 0");
  if (t >= model.horizon_T) return 0.0;
  const EllKernel k(hp, model, {t});
  return k.value(0, f_t, a_t, kappa);
}

}  // namespace ammhl
