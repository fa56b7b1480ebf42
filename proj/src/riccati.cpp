#include "ammhl/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ammhl/errors.hpp"

namespace ammhl {

DreSystem DreSystem::from(const HedgeParams& hp) {
  const double b = hp.beta_res, c = hp.c, eta2 = 2.0 * hp.eta;
  DreSystem s;
  s.B11 << -b, 0.0, 0.0, 0.0;
  s.B12 << c, 0.0, 1.0, 0.0;
  s.B21 << b / eta2, (hp.phi + c * b) / eta2, 0.0, b;
  s.B22 << 0.0, c * b / eta2, 0.0, b;
  s.G << 0.0, c / eta2, 0.0, 0.0;
  return s;
}

Mat2 DreSystem::rhs(const Mat2& P) const { return -P * B11 - P * B12 * P + B21 + B22 * P; }

Mat2 RiccatiSolution::at(double t) const {
  const std::size_t n = mesh_n;
  const double h = horizon_T / static_cast<double>(n);
  double u = t / h;
  auto k = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(n - 1)));
  u -= static_cast<double>(k);
  const Mat2& p0 = P_mat[k];
  const Mat2& p1 = P_mat[k + 1];
  const Mat2 m0 = sys.rhs(p0) * h;
  const Mat2 m1 = sys.rhs(p1) * h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1;
}

RiccatiSolution integrate_dre(const HedgeParams& hp, double horizon_T, std::size_t mesh_n) {
  hp.validate();
  if (mesh_n < 4) fail(ErrorKind::domain, "solve_dre: mesh_n must be >= 4");
  RiccatiSolution sol;
  sol.horizon_T = horizon_T;
  sol.mesh_n = mesh_n;
  sol.sys = DreSystem::from(hp);
  sol.grid = time_grid(horizon_T, mesh_n);
  sol.P_mat.resize(mesh_n + 1);
  const double h = -horizon_T / static_cast<double>(mesh_n);
  Mat2 P = sol.sys.G;
  sol.P_mat[mesh_n] = P;
  for (std::size_t k = mesh_n; k-- > 0;) {
    const Mat2 k1 = sol.sys.rhs(P);
    const Mat2 k2 = sol.sys.rhs(P + 0.5 * h * k1);
    const Mat2 k3 = sol.sys.rhs(P + 0.5 * h * k2);
    const Mat2 k4 = sol.sys.rhs(P + h * k3);
    P += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!P.allFinite()) fail(ErrorKind::convergence, "solve_dre: solution blew up");
    sol.P_mat[k] = P;
  }
  sol.residual_sup = dre_residual_sup(sol);
  return sol;
}

double dre_residual_sup(const RiccatiSolution& sol) {
  const std::size_t n = sol.mesh_n;
  const double h = sol.horizon_T / static_cast<double>(n);
  double sup = 0.0;
  for (std::size_t k = 2; k + 2 <= n; ++k) {
    const Mat2 d = (-sol.P_mat[k + 2] + 8.0 * sol.P_mat[k + 1] - 8.0 * sol.P_mat[k - 1] + sol.P_mat[k - 2]) / (12.0 * h);
    sup = std::max(sup, (d - sol.sys.rhs(sol.P_mat[k])).cwiseAbs().maxCoeff());
  }
  return sup;
}

RiccatiSolution solve_dre(const HedgeParams& hp, double horizon_T, std::size_t mesh_n, double tol,
                          int max_refinements) {
  hp.validate();
  if (!(horizon_T > 0.0)) fail(ErrorKind::domain, "solve_dre: horizon must be > 0");
  if (hp.c > 0.0 && !hp.impact_bounded())
    fail(ErrorKind::precondition, "solve_dre: impact scale c must be below sqrt(2 eta phi)");
  std::size_t n = mesh_n;
  for (int r = 0;; ++r) {
    RiccatiSolution sol = integrate_dre(hp, horizon_T, n);
    if (sol.residual_sup <= tol) return sol;
    if (r == max_refinements)
      fail(ErrorKind::convergence, "solve_dre: residual " + std::to_string(sol.residual_sup) +
                                       " above tolerance at mesh " + std::to_string(n));
    n *= 2;
  }
}

FbsdeAssembler::FbsdeAssembler(const RiccatiSolution& dre, const HedgeParams& hp,
                               const MarketModel& model, const std::vector<double>& times) {
  model.validate(true);
  if (model.signal.kind == SignalModel::Kind::ou)
    fail(ErrorKind::capability, "FBSDE assembly supports zero and constant signals only");
  if (std::abs(dre.horizon_T - model.horizon_T) > 1e-12 * model.horizon_T)
    fail(ErrorKind::shape, "FBSDE assembly: DRE horizon differs from market horizon");
  const DreSystem& S = dre.sys;
  B12_ = S.B12;
  const double a = model.signal.kind == SignalModel::Kind::constant ? model.signal.a : 0.0;
  const double s2 = model.sigma * model.sigma;
  const double m = -0.5 * a + 0.375 * s2;  // growth of E[F^{-1/2}]
  const double eta2 = 2.0 * hp.eta;
  const Vec2 v1((hp.phi + hp.c * hp.beta_res) / eta2, hp.beta_res - m);
  const Vec2 v2(-a / eta2, 0.0);

  const std::size_t n = times.size();
  p_.resize(n);
  for (std::size_t k = 0; k < n; ++k) p_[k] = dre.at(times[k]);
  dt_.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) dt_[k] = times[k + 1] - times[k];

  const Mat2 I2 = Mat2::Identity();
  auto K = [&](const Mat2& P) -> Mat2 { return P * S.B12 - S.B22; };

  // backward RK4 for alpha' = -(K + m) alpha + v1 and omega' = -(K + a) omega + v2
  alpha_.assign(n, Vec2::Zero());
  omega_.assign(n, Vec2::Zero());
  alpha_[n - 1] = Vec2(hp.c / eta2, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    const double h = -dt_[k];
    const Mat2 K1 = K(p_[k + 1]);
    const Mat2 Km = K(dre.at(0.5 * (times[k] + times[k + 1])));
    const Mat2 K0 = K(p_[k]);
    auto stepper = [&](const Vec2& y, double rate, const Vec2& v) {
      auto f = [&](const Mat2& Kt, const Vec2& x) -> Vec2 { return -(Kt + rate * I2) * x + v; };
      const Vec2 r1 = f(K1, y);
      const Vec2 r2 = f(Km, y + 0.5 * h * r1);
      const Vec2 r3 = f(Km, y + 0.5 * h * r2);
      const Vec2 r4 = f(K0, y + h * r3);
      return Vec2(y + h / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4));
    };
    alpha_[k] = stepper(alpha_[k + 1], m, v1);
    omega_[k] = stepper(omega_[k + 1], a, v2);
  }

  // forward transition matrices of X' = (B11 + B12 P) X
  step_.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = dt_[k];
    const Mat2 A0 = S.B11 + S.B12 * p_[k];
    const Mat2 Am = S.B11 + S.B12 * dre.at(times[k] + 0.5 * h);
    const Mat2 A1 = S.B11 + S.B12 * p_[k + 1];
    const Mat2 r1 = A0;
    const Mat2 r2 = Am * (I2 + 0.5 * h * r1);
    const Mat2 r3 = Am * (I2 + 0.5 * h * r2);
    const Mat2 r4 = A1 * (I2 + h * r3);
    step_[k] = I2 + h / 6.0 * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
  }
}

void FbsdeAssembler::run(const double* f, double kappa, double q0, double* nu, double* q, double* i,
                         double* z, double* ell) const {
  const std::size_t n = p_.size();
  auto ell_at = [&](std::size_t k) -> Vec2 {
    return kappa / std::sqrt(f[k]) * alpha_[k] + f[k] * omega_[k];
  };
  Vec2 phi(0.0, q0);
  Vec2 l = ell_at(0);
  for (std::size_t k = 0;; ++k) {
    const Vec2 psi = p_[k] * phi + l;
    nu[k] = psi(0);
    z[k] = psi(1);
    i[k] = phi(0);
    q[k] = phi(1);
    ell[k] = l(0);
    if (k + 1 == n) break;
    const Vec2 l_next = ell_at(k + 1);
    phi = step_[k] * phi + 0.5 * dt_[k] * (step_[k] * (B12_ * l) + B12_ * l_next);
    l = l_next;
  }
}

HedgePath assemble_fbsde_solution(const RiccatiSolution& dre, const PathBundle& paths, double kappa,
                                  const HedgeParams& hp, const MarketModel& model, Exec exec) {
  hp.validate();
  if (paths.times.size() != paths.n_steps + 1) fail(ErrorKind::shape, "assemble_fbsde_solution: bad time grid");
  const FbsdeAssembler asmb(dre, hp, model, paths.times);
  HedgePath out;
  out.resize(paths.n_paths, paths.n_steps);
  out.times = paths.times;
  const std::size_t m = paths.stride();
  auto body = [&](long long p) {
    const double q0 = hp.initial_inventory(kappa / std::sqrt(paths.f_row(p)[0]));
    asmb.run(paths.f_row(p), kappa, q0, out.nu.data() + p * m, out.q.data() + p * m,
             out.i.data() + p * m, out.z.data() + p * m, out.ell.data() + p * m);
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
