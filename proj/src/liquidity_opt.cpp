#include "ammhl/liquidity_opt.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ammhl/errors.hpp"
#include "ammhl/riccati.hpp"

namespace ammhl {

namespace {

template <class F>
double integrate(F&& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}

void require_zero_signal(const MarketModel& model, const char* who) {
  if (model.signal.kind != SignalModel::Kind::zero)
    fail(ErrorKind::capability, std::string(who) + ": requires the zero signal");
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v, std::size_t stride = 1, std::size_t offset = 0) {
  const std::size_t n = v.size() / stride;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += v[k * stride + offset];
  MeanSe r;
  r.mean = sum / static_cast<double>(n);
  if (n < 2) return r;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = v[k * stride + offset] - r.mean;
    ss += d * d;
  }
  r.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return r;
}

}  // namespace

void StageOneInputs::validate() const {
  model.validate();
  hp.validate();
  flow.validate();
}

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::interior: return "interior";
    case Boundary::shutdown: return "shutdown";
    case Boundary::budget: return "budget";
  }
  return "unknown";
}

double ct_bracket(double x) {
  if (!(x > 0.0)) fail(ErrorKind::domain, "ct_bracket: x must be > 0");
  if (x <= 1.0) {
    // sum_{n>=2} x^n / n! (1 - (16/3)(3/8)^n); the linear terms cancel exactly
    double term = x;  // x^n / n!
    double r = 0.375;  // (3/8)^n
    double sum = 0.0;
    for (int n = 2; n < 40; ++n) {
      term *= x / n;
      r *= 0.375;
      const double add = term * (1.0 - 16.0 / 3.0 * r);
      sum += add;
      if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::expm1(x) + x - 16.0 / 3.0 * std::expm1(0.375 * x);
}

KappaRef kappa_ref_closed_form(const MarketModel& model, double gamma, double phi) {
  model.validate();
  require_zero_signal(model, "kappa_ref_closed_form");
  if (!(phi > 0.0)) fail(ErrorKind::domain, "kappa_ref_closed_form: phi must be > 0");
  const double s2 = model.sigma * model.sigma;
  const double x = s2 * model.horizon_T;
  const double e = std::expm1(-x / 8.0);  // e^{-x/8} - 1
  KappaRef r;
  r.numerator = -8.0 * gamma * e + s2 * (1.0 + 2.0 * e);
  r.denominator = phi * ct_bracket(x);
  if (!(r.denominator > 0.0)) fail(ErrorKind::consistency, "kappa_ref_closed_form: non-positive denominator");
  if (r.numerator <= 0.0) {
    r.shutdown = true;
    return r;
  }
  r.kappa_ref = r.numerator / r.denominator * std::pow(model.f0, 1.5);
  return r;
}

KappaRef kappa_ref_closed_form(const MarketModel& model, const FlowParams& flow, double phi) {
  return kappa_ref_closed_form(model, flow.gamma(), phi);
}

double frak_B_zero_signal(double sigma, double horizon_T, double rate) {
  const TrackingKernels tk(rate, horizon_T);
  const double s2 = sigma * sigma, k = 0.375 * s2, T = horizon_T;
  const double lc0 = tk.log_cosh(T);
  auto first = [&](double t) {
    // (1 - Ptilde(0, t)) (e^{kt} - 1)
    return -std::expm1(tk.log_cosh(T - t) - lc0) * std::expm1(k * t);
  };
  auto second = [&](double s) {
    const double gk = tk.G(s, k);
    return gk * (std::exp(s2 * s) * gk - std::exp(k * s) * tk.G(s, 0.0));
  };
  return integrate(first, 0.0, T) - rate * rate * integrate(second, 0.0, T);
}

KappaStarA0 kappa_star_closed_form_A0(const MarketModel& model, const FlowParams& flow,
                                      const HedgeParams& hp) {
  hp.validate();
  if (hp.c != 0.0) fail(ErrorKind::capability, "kappa_star_closed_form_A0: requires c = 0");
  const KappaRef ref = kappa_ref_closed_form(model, flow.gamma(), hp.phi);
  KappaStarA0 r;
  r.kappa_ref = ref.kappa_ref;
  r.shutdown = ref.shutdown;
  r.c_t = ct_bracket(model.sigma * model.sigma * model.horizon_T);
  r.frak_B = frak_B_zero_signal(model.sigma, model.horizon_T, hp.tracking_rate());
  const double den = model.sigma * model.sigma * r.frak_B + r.c_t;
  if (!(den > 0.0)) fail(ErrorKind::consistency, "kappa_star_closed_form_A0: non-positive scaling denominator");
  r.scaling = r.c_t / den;
  r.kappa_star = r.kappa_ref * r.scaling;
  return r;
}

double numerator_N(const MarketModel& model, double gamma) {
  model.validate();
  const double f0 = model.f0, a0 = model.signal.initial(), T = model.horizon_T;
  const double fees = integrate([&](double t) { return cond_moment(0.5, f0, t, model, a0); }, 0.0, T);
  return gamma * fees + 2.0 * cond_moment(0.5, f0, T, model, a0) -
         cond_moment(1.0, f0, T, model, a0) / std::sqrt(f0);
}

double deviation_E(const MarketModel& model) {
  model.validate();
  const double f0 = model.f0, a0 = model.signal.initial();
  const double r0 = 1.0 / std::sqrt(f0);
  return integrate(
      [&](double t) {
        return cond_moment(-1.0, f0, t, model, a0) - 2.0 * r0 * cond_moment(-0.5, f0, t, model, a0) +
               r0 * r0;
      },
      0.0, model.horizon_T);
}

double default_kappa_max(const StageOneInputs& in) {
  if (in.kappa_max > 0.0) return in.kappa_max;
  double ref = 0.0;
  if (in.model.signal.kind == SignalModel::Kind::zero) {
    ref = kappa_ref_closed_form(in.model, in.flow.gamma(), in.hp.phi).kappa_ref;
    return ref > 0.0 ? 2.0 * ref : 1.0;
  }
  const double n = numerator_N(in.model, in.flow.gamma());
  ref = n / (in.hp.phi * deviation_E(in.model));
  return ref > 0.0 ? 4.0 * ref : 1.0;
}

StageOneResult kappa_star_with_signal(const StageOneInputs& in, const SimGrid& grid, Exec exec) {
  in.validate();
  grid.validate();
  if (in.hp.c != 0.0) fail(ErrorKind::capability, "kappa_star_with_signal: requires c = 0");
  StageOneResult res;
  res.inputs = in;
  res.grid = grid;
  const MarketModel& model = in.model;
  const double phi = in.hp.phi;
  res.numerator_N = numerator_N(model, in.flow.gamma());
  res.deviation_E = deviation_E(model);
  if (res.numerator_N > 0.0) res.kappa_ref = res.numerator_N / (phi * res.deviation_E);
  else res.shutdown = true;

  const std::vector<double> times = time_grid(model.horizon_T, grid.n_steps);
  const PathSimulator sim(model, grid);
  const EllKernel ell(in.hp, model, times);
  const TrackingKernels tk(in.hp.tracking_rate(), model.horizon_T);
  const std::size_t n = grid.n_steps, m = n + 1;
  std::vector<double> decay(n), dts(n);
  for (std::size_t i = 0; i < n; ++i) {
    decay[i] = tk.Ptilde(times[i], times[i + 1]);
    dts[i] = times[i + 1] - times[i];
  }
  const double r0 = 1.0 / std::sqrt(model.f0);

  std::vector<double> per_path(2 * grid.n_paths);
  auto body = [&](long long p, std::vector<double>& f, std::vector<double>& a) {
    sim.run(static_cast<std::uint64_t>(p), f.data(), a.data(), nullptr);
    double cq = -r0;
    double cl = ell.c_coef(0, a[0]) / std::sqrt(f[0]);
    double fa_prev = (cq + r0) * a[0] * f[0];
    double fb_prev = (cq + r0) * (1.0 / std::sqrt(f[0]) - r0);
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double inv = 1.0 / std::sqrt(f[i + 1]);
      const double cl_next = ell.c_coef(i + 1, a[i + 1]) * inv;
      cq = decay[i] * cq + 0.5 * dts[i] * (decay[i] * cl + cl_next);
      cl = cl_next;
      const double fa = (cq + r0) * a[i + 1] * f[i + 1];
      const double fb = (cq + r0) * (inv - r0);
      sa += 0.5 * dts[i] * (fa_prev + fa);
      sb += 0.5 * dts[i] * (fb_prev + fb);
      fa_prev = fa;
      fb_prev = fb;
    }
    per_path[2 * p] = sa;
    per_path[2 * p + 1] = sb;
  };
  const auto np = static_cast<long long>(grid.n_paths);
  if (exec == Exec::parallel) {
#pragma omp parallel num_threads(thread_count())
    {
      std::vector<double> f(m), a(m);
#pragma omp for schedule(static)
      for (long long p = 0; p < np; ++p) body(p, f, a);
    }
  } else {
    std::vector<double> f(m), a(m);
    for (long long p = 0; p < np; ++p) body(p, f, a);
  }
  const MeanSe fa = mean_se(per_path, 2, 0);
  const MeanSe fb = mean_se(per_path, 2, 1);
  res.frak_A = fa.mean;
  res.frak_A_se = fa.se;
  res.frak_B = fb.mean;
  res.frak_B_se = fb.se;
  if (res.frak_B + res.deviation_E < -3.0 * res.frak_B_se)
    fail(ErrorKind::consistency, "kappa_star_with_signal: frak_B + E is negative beyond sampling error");

  const double den = phi * (res.frak_B + res.deviation_E);
  double ks = den > 0.0 ? (res.numerator_N + res.frak_A) / den : 0.0;
  const double cap = in.kappa_max > 0.0 ? in.kappa_max : std::numeric_limits<double>::infinity();
  ks = std::clamp(ks, 0.0, cap);
  res.kappa_star = ks;
  res.scaling = res.kappa_ref > 0.0 ? ks / res.kappa_ref : 0.0;
  return res;
}

namespace {

// Evaluates the direct criterion and its running-reward decomposition for
// every depth on one simulated path.
class PathEvaluator {
 public:
  PathEvaluator(const StageOneInputs& in, const SimGrid& grid)
      : in_(in), sim_(in.model, grid), times_(time_grid(in.model.horizon_T, grid.n_steps)) {
    if (in.hp.c == 0.0) {
      nt_ = std::make_unique<NoTransientHedger>(in.hp, in.model, times_);
    } else {
      dre_ = std::make_unique<RiccatiSolution>(solve_dre(in.hp, in.model.horizon_T, in.dre_mesh_n));
      fb_ = std::make_unique<FbsdeAssembler>(*dre_, in.hp, in.model, times_);
    }
  }

  struct Buffers {
    explicit Buffers(std::size_t m) : f(m), a(m), nu(m), q(m), imp(m, 0.0), z(m), ell(m) {}
    std::vector<double> f, a, nu, q, imp, z, ell;
  };

  void simulate(std::uint64_t p, Buffers& b) const { sim_.run(p, b.f.data(), b.a.data(), nullptr); }

  // returns (direct, decomposition)
  std::pair<double, double> evaluate(double kappa, Buffers& b) const {
    const std::size_t n = times_.size() - 1;
    const double* f = b.f.data();
    const double* a = b.a.data();
    const double y0 = kappa / std::sqrt(f[0]);
    const double q0 = -y0;
    if (nt_) nt_->run(f, a, kappa, q0, b.nu.data(), b.q.data(), b.ell.data());
    else fb_->run(f, kappa, q0, b.nu.data(), b.q.data(), b.imp.data(), b.z.data(), b.ell.data());

    const double gamma = in_.flow.gamma(), eta = in_.hp.eta, phi = in_.hp.phi;
    const double c = in_.hp.c, beta = in_.hp.beta_res, s2 = in_.model.sigma * in_.model.sigma;
    const double* q = b.q.data();
    const double* nu = b.nu.data();
    const double* imp = b.imp.data();

    auto y_at = [&](std::size_t i) { return kappa / std::sqrt(f[i]); };
    auto S = [&](std::size_t i) { return f[i] + imp[i]; };
    // integrands of the decomposition at node i
    auto dec_run = [&](std::size_t i) {
      const double y = y_at(i), sq = std::sqrt(f[i]);
      const double qt = q[i] - q0;
      const double gf = kappa / sq * (-0.5 * a[i] + 0.375 * s2);
      const double quad_part = 2.0 * qt * (beta * imp[i] - c * nu[i]) + phi * qt * qt;
      const double lin = gf * imp[i] + (y + q0) * (c * nu[i] - beta * imp[i] - phi * qt) + a[i] * f[i] * qt;
      const double running = (0.5 * s2 - 2.0 * gamma) * (-0.5 * kappa * sq) + a[i] * f[i] * (y - y0) -
                             0.5 * phi * (y - y0) * (y - y0);
      return -0.5 * quad_part + lin + running;
    };
    auto pen = [&](std::size_t i) { const double d = q[i] + y_at(i); return d * d; };

    double fee = 0.0, trade = 0.0, penalty = 0.0, cost = 0.0, dec = 0.0;
    double fee_prev = gamma * kappa * std::sqrt(f[0]);
    double pen_prev = pen(0), dec_prev = dec_run(0);
    for (std::size_t i = 0; i < n; ++i) {
      const double dt = times_[i + 1] - times_[i];
      const double fee_next = gamma * kappa * std::sqrt(f[i + 1]);
      const double pen_next = pen(i + 1), dec_next = dec_run(i + 1);
      fee += 0.5 * dt * (fee_prev + fee_next);
      penalty += 0.5 * dt * (pen_prev + pen_next);
      dec += 0.5 * dt * (dec_prev + dec_next);
      const double dq = q[i + 1] - q[i];
      trade += S(i + 1) * dq;
      cost += eta * dq * dq / dt;
      fee_prev = fee_next;
      pen_prev = pen_next;
      dec_prev = dec_next;
    }
    const double x_t = kappa * std::sqrt(f[n]);
    const double direct = fee + x_t + y_at(n) * S(n) + q[n] * S(n) - trade - cost - 0.5 * phi * penalty;
    const double decomposition = kappa * std::sqrt(f[0]) - cost / 2.0 + dec;
    return {direct, decomposition};
  }

  std::size_t size() const { return times_.size(); }

 private:
  const StageOneInputs& in_;
  PathSimulator sim_;
  std::vector<double> times_;
  std::unique_ptr<NoTransientHedger> nt_;
  std::unique_ptr<RiccatiSolution> dre_;
  std::unique_ptr<FbsdeAssembler> fb_;
};

}  // namespace

std::vector<McValue> mc_objective_curve(const std::vector<double>& kappas, const StageOneInputs& in,
                                        const SimGrid& grid, Exec exec) {
  in.validate();
  grid.validate();
  for (double k : kappas)
    if (!(k >= 0.0)) fail(ErrorKind::domain, "mc_objective: kappa must be >= 0");
  const PathEvaluator ev(in, grid);
  const std::size_t nk = kappas.size(), np = grid.n_paths;
  std::vector<double> direct(np * nk), decomp(np * nk);

  auto body = [&](long long p, PathEvaluator::Buffers& buf) {
    ev.simulate(static_cast<std::uint64_t>(p), buf);
    for (std::size_t j = 0; j < nk; ++j) {
      const auto [d, e] = ev.evaluate(kappas[j], buf);
      direct[p * nk + j] = d;
      decomp[p * nk + j] = e;
    }
  };
  const auto n = static_cast<long long>(np);
  if (exec == Exec::parallel) {
#pragma omp parallel num_threads(thread_count())
    {
      PathEvaluator::Buffers buf(ev.size());
#pragma omp for schedule(static)
      for (long long p = 0; p < n; ++p) body(p, buf);
    }
  } else {
    PathEvaluator::Buffers buf(ev.size());
    for (long long p = 0; p < n; ++p) body(p, buf);
  }

  std::vector<McValue> out(nk);
  std::vector<double> diff(np * nk);
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = direct[k] - decomp[k];
  for (std::size_t j = 0; j < nk; ++j) {
    const MeanSe d = mean_se(direct, nk, j);
    const MeanSe e = mean_se(decomp, nk, j);
    out[j].value = d.mean;
    out[j].se = d.se;
    out[j].decomposition = e.mean;
    out[j].decomposition_se = e.se;
    out[j].difference_se = mean_se(diff, nk, j).se;
  }
  return out;
}

McValue mc_objective(double kappa, const StageOneInputs& in, const SimGrid& grid, Exec exec) {
  return mc_objective_curve({kappa}, in, grid, exec).front();
}

OptimizeResult maximize_on_grid(const BatchObjective& eval, double kappa_max, std::size_t grid_n,
                                double rel_tol) {
  if (!(kappa_max > 0.0)) fail(ErrorKind::domain, "maximize_on_grid: kappa_max must be > 0");
  if (grid_n < 3) fail(ErrorKind::domain, "maximize_on_grid: need at least 3 grid points");
  std::vector<double> ks(grid_n);
  for (std::size_t j = 0; j < grid_n; ++j)
    ks[j] = kappa_max * static_cast<double>(j) / static_cast<double>(grid_n - 1);
  OptimizeResult res;
  res.curve = eval(ks);
  std::size_t best = 0;
  for (std::size_t j = 1; j < grid_n; ++j)
    if (res.curve[j].value > res.curve[best].value) best = j;
  res.argmax = ks[best];
  res.value = res.curve[best].value;
  if (best == 0) {
    res.boundary = Boundary::shutdown;
    return res;
  }
  if (best == grid_n - 1) {
    res.boundary = Boundary::budget;
    return res;
  }

  // golden section on [k_{j-1}, k_{j+1}]
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = ks[best - 1], hi = ks[best + 1];
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = eval({x1}).front().value, f2 = eval({x2}).front().value;
  const double tol = rel_tol * kappa_max;
  while (hi - lo > tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = eval({x1}).front().value;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = eval({x2}).front().value;
    }
  }
  const double xm = f1 >= f2 ? x1 : x2;
  const double fm = std::max(f1, f2);
  if (fm > res.value) {
    res.argmax = xm;
    res.value = fm;
  }
  return res;
}

OptimizeResult optimize_kappa_mc(const StageOneInputs& in, const SimGrid& grid, std::size_t kappa_grid_n,
                                 Exec exec) {
  const double kmax = default_kappa_max(in);
  auto eval = [&](const std::vector<double>& ks) {
    const std::vector<McValue> v = mc_objective_curve(ks, in, grid, exec);
    std::vector<ValuePoint> out(ks.size());
    for (std::size_t j = 0; j < ks.size(); ++j) out[j] = {ks[j], v[j].value, v[j].se};
    return out;
  };
  return maximize_on_grid(eval, kmax, kappa_grid_n);
}

}  // namespace ammhl
