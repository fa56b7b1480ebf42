#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "ammhl/hedging.hpp"
#include "ammhl/market_dynamics.hpp"

namespace ammhl {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// Coefficients of the forward-backward system in (Phi, Psi) = ((I, Q), (nu, Z)).
struct DreSystem {
  Mat2 B11, B12, B21, B22, G;

  static DreSystem from(const HedgeParams& hp);
  // P' = -P B11 - P B12 P + B21 + B22 P
  Mat2 rhs(const Mat2& P) const;
};

struct RiccatiSolution {
  double horizon_T = 0.0;
  std::size_t mesh_n = 0;
  std::vector<double> grid;
  std::vector<Mat2> P_mat;
  double residual_sup = 0.0;
  DreSystem sys;

  // cubic Hermite between mesh nodes, slopes from the equation itself
  Mat2 at(double t) const;
};

// One backward RK4 sweep on a uniform mesh; no tolerance check.
RiccatiSolution integrate_dre(const HedgeParams& hp, double horizon_T, std::size_t mesh_n);

// sup over interior nodes of |P' - rhs(P)|, P' from a 5-point centred stencil
double dre_residual_sup(const RiccatiSolution& sol);

// Solves and refines the mesh (doubling, at most max_refinements times) until
// residual_sup <= tol. Throws precondition if c >= sqrt(2 eta phi) and
// convergence if the tolerance is never met.
RiccatiSolution solve_dre(const HedgeParams& hp, double horizon_T, std::size_t mesh_n,
                          double tol = 1e-8, int max_refinements = 4);

// Pathwise assembly of the optimal control from a DRE solution for zero or
// constant signals. The forcing splits as
//   ell_t = kappa F_t^{-1/2} alpha(t) + F_t omega(t)
// with deterministic alpha, omega solving linear backward ODEs driven by P.
class FbsdeAssembler {
 public:
  FbsdeAssembler(const RiccatiSolution& dre, const HedgeParams& hp, const MarketModel& model,
                 const std::vector<double>& times);

  // f: times.size() prices. Outputs nu, q, i, z, ell (first component).
  void run(const double* f, double kappa, double q0, double* nu, double* q, double* i, double* z,
           double* ell) const;

  const std::vector<Vec2>& alpha() const { return alpha_; }
  const std::vector<Vec2>& omega() const { return omega_; }

 private:
  Mat2 B12_;
  std::vector<Mat2> p_;
  std::vector<Mat2> step_;  // transition of X' = (B11 + B12 P) X over [t_i, t_{i+1}]
  std::vector<double> dt_;
  std::vector<Vec2> alpha_;
  std::vector<Vec2> omega_;
};

HedgePath assemble_fbsde_solution(const RiccatiSolution& dre, const PathBundle& paths, double kappa,
                                  const HedgeParams& hp, const MarketModel& model,
                                  Exec exec = Exec::parallel);

}  // namespace ammhl
