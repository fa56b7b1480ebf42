#include "ammhl/noise_flow.hpp"

#include <cmath>

#include "ammhl/errors.hpp"
#include "ammhl/rng.hpp"

namespace ammhl {

ValuationLaw ValuationLaw::uniform(double fee_pi) {
  ValuationLaw v;
  v.kind = Kind::uniform;
  v.lo = fee_pi;
  v.v_bar = 0.5 * (1.0 + fee_pi);
  return v;
}

ValuationLaw ValuationLaw::two_point(double fee_pi, double v_bar, double eps) {
  ValuationLaw v;
  v.kind = Kind::two_point;
  v.lo = fee_pi;
  v.v_bar = v_bar;
  v.eps = eps;
  v.validate();
  return v;
}

ValuationLaw ValuationLaw::point_mass(double fee_pi, double v_bar) {
  ValuationLaw v;
  v.kind = Kind::point_mass;
  v.lo = fee_pi;
  v.v_bar = v_bar;
  v.validate();
  return v;
}

void ValuationLaw::validate() const {
  if (!(lo > 0.0 && lo < 1.0)) fail(ErrorKind::domain, "valuation: fee_pi must lie in (0,1)");
  if (!(v_bar >= lo && v_bar <= 1.0)) fail(ErrorKind::domain, "valuation: v_bar must lie in [pi,1]");
  if (kind == Kind::two_point) {
    if (!(eps >= 0.0 && lo + eps < 1.0)) fail(ErrorKind::domain, "valuation: bad two-point eps");
    if (v_bar < lo + eps) fail(ErrorKind::domain, "valuation: v_bar below two-point support");
  }
  if (kind == Kind::uniform && std::abs(v_bar - 0.5 * (1.0 + lo)) > 1e-15)
    fail(ErrorKind::domain, "valuation: uniform law has v_bar = (1 + pi)/2");
}

double ValuationLaw::sample(PathRng& rng) const {
  switch (kind) {
    case Kind::uniform: return lo + (1.0 - lo) * rng.uniform();
    case Kind::two_point: {
      const double low = lo + eps;
      const double p_high = (v_bar - low) / (1.0 - low);
      return rng.uniform() < p_high ? 1.0 : low;
    }
    case Kind::point_mass: return v_bar;
  }
  return v_bar;
}

std::string ValuationLaw::name() const {
  switch (kind) {
    case Kind::uniform: return "uniform";
    case Kind::two_point: return "two_point";
    case Kind::point_mass: return "point_mass";
  }
  return "unknown";
}

double FlowParams::gamma() const { return 0.5 * lambda * fee_pi * (v_bar() - fee_pi); }

void FlowParams::validate() const {
  if (!(lambda >= 0.0)) fail(ErrorKind::domain, "flow: lambda must be >= 0");
  valuation.validate();
  if (valuation.lo != fee_pi) fail(ErrorKind::domain, "flow: valuation support must start at fee_pi");
}

double lambda_for_gamma(double gamma, double fee_pi, double v_bar) {
  if (!(gamma >= 0.0)) fail(ErrorKind::domain, "lambda_for_gamma: gamma must be >= 0");
  const double denom = fee_pi * (v_bar - fee_pi);
  if (gamma == 0.0) return 0.0;
  if (!(denom > 0.0)) fail(ErrorKind::domain, "lambda_for_gamma: v_bar must exceed fee_pi");
  return 2.0 * gamma / denom;
}

FlowParams FlowParams::from_gamma(double gamma, double fee_pi, ValuationLaw::Kind kind,
                                  double v_bar) {
  FlowParams fp;
  fp.fee_pi = fee_pi;
  switch (kind) {
    case ValuationLaw::Kind::uniform: fp.valuation = ValuationLaw::uniform(fee_pi); break;
    case ValuationLaw::Kind::two_point: fp.valuation = ValuationLaw::two_point(fee_pi, v_bar); break;
    case ValuationLaw::Kind::point_mass: fp.valuation = ValuationLaw::point_mass(fee_pi, v_bar); break;
  }
  fp.lambda = lambda_for_gamma(gamma, fee_pi, fp.v_bar());
  return fp;
}

double optimal_volume(double v_abs, double f, double kappa, double fee_pi) {
  if (v_abs < fee_pi) fail(ErrorKind::domain, "optimal_volume: |V| below fee");
  if (!(f > 0.0) || !(kappa > 0.0)) fail(ErrorKind::domain, "optimal_volume: f, kappa must be > 0");
  return 0.5 * kappa * (v_abs - fee_pi) / std::sqrt(f);
}

double fee_rate(double f, double kappa, const FlowParams& flow) {
  if (!(f > 0.0) || !(kappa >= 0.0)) fail(ErrorKind::domain, "fee_rate: bad price or depth");
  return flow.gamma() * kappa * std::sqrt(f);
}

double expected_fee_integral(double f0, double kappa, double gamma, double sigma, double horizon_T) {
  // int_0^T gamma kappa sqrt(F0) e^{-sigma^2 t / 8} dt
  const double r = sigma * sigma / 8.0;
  const double integral = r > 0.0 ? -std::expm1(-r * horizon_T) / r : horizon_T;
  return gamma * kappa * std::sqrt(f0) * integral;
}

FeeAccrual simulate_fee_accrual(const PathBundle& paths, const FlowParams& flow, double kappa,
                                std::uint64_t seed_offset, Exec exec) {
  flow.validate();
  if (!(kappa >= 0.0)) fail(ErrorKind::domain, "simulate_fee_accrual: kappa must be >= 0");
  FeeAccrual out;
  out.n_paths = paths.n_paths;
  out.n_steps = paths.n_steps;
  const std::size_t m = paths.stride();
  out.realized.assign(paths.n_paths * m, 0.0);
  out.rate.assign(paths.n_paths * m, 0.0);
  if (paths.n_steps == 0) return out;

  const double dt = paths.times[1] - paths.times[0];
  const double p_arrival = flow.lambda * dt;
  out.discretization_warning = p_arrival > 0.1;
  const double gamma = flow.gamma();
  const std::uint64_t seed = paths.seed + seed_offset;

  auto body = [&](long long p) {
    const double* f = paths.f_row(p);
    double* real = out.realized.data() + p * m;
    double* rate = out.rate.data() + p * m;
    PathRng arrivals(seed, static_cast<std::uint64_t>(p), Stream::arrivals);
    PathRng valuations(seed, static_cast<std::uint64_t>(p), Stream::valuations);
    double prev_pi = gamma * kappa * std::sqrt(f[0]);
    for (std::size_t i = 0; i < paths.n_steps; ++i) {
      double fee = 0.0;
      if (p_arrival > 0.0 && arrivals.uniform() < p_arrival && kappa > 0.0) {
        const double v = flow.valuation.sample(valuations);
        fee = flow.fee_pi * optimal_volume(v, f[i], kappa, flow.fee_pi) * f[i];
      }
      real[i + 1] = real[i] + fee;
      const double next_pi = gamma * kappa * std::sqrt(f[i + 1]);
      rate[i + 1] = rate[i] + 0.5 * dt * (prev_pi + next_pi);
      prev_pi = next_pi;
    }
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
