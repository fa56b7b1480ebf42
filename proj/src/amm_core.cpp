#include "ammhl/amm_core.hpp"

#include <cmath>

#include "ammhl/errors.hpp"

namespace ammhl {

namespace {

inline void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::domain, what);
}

}  // namespace

double ConstantProduct::phi(double y, double kappa) const { return kappa * kappa / y; }

double ConstantProduct::d1_phi(double y, double kappa) const {
  return -kappa * kappa / (y * y);
}

double ConstantProduct::d11_phi(double y, double kappa) const {
  return 2.0 * kappa * kappa / (y * y * y);
}

double ConstantProduct::phi_increment(double y, double dy, double kappa) const {
  return -kappa * kappa * dy / (y * (y + dy));
}

double ConstantProduct::h(double f, double kappa) const { return kappa / std::sqrt(f); }

double ConstantProduct::d1_h(double f, double kappa) const {
  return -0.5 * kappa / (f * std::sqrt(f));
}

double ConstantProduct::d11_h(double f, double kappa) const {
  return 0.75 * kappa / (f * f * std::sqrt(f));
}

std::shared_ptr<const Curve> constant_product() {
  static const auto instance = std::make_shared<const ConstantProduct>();
  return instance;
}

void PoolSpec::validate() const {
  check_positive(kappa, "pool: kappa must be > 0");
  // fee_pi = 0 is accepted so frictionless prices can be compared directly
  if (!(fee_pi >= 0.0 && fee_pi < 1.0)) fail(ErrorKind::domain, "pool: fee_pi must lie in [0,1)");
  if (!curve) fail(ErrorKind::domain, "pool: missing curve");
}

CurveEval evaluate(const PoolSpec& pool, double y) {
  pool.validate();
  check_positive(y, "evaluate: y must be > 0");
  const Curve& c = *pool.curve;
  return {c.phi(y, pool.kappa), y, -c.d1_phi(y, pool.kappa), c.d11_phi(y, pool.kappa)};
}

double level_value(double y, double kappa) {
  check_positive(y, "level_value: y must be > 0");
  check_positive(kappa, "level_value: kappa must be > 0");
  return kappa * kappa / y;
}

double marginal_price(double y, double kappa) {
  check_positive(y, "marginal_price: y must be > 0");
  check_positive(kappa, "marginal_price: kappa must be > 0");
  const double r = kappa / y;
  return r * r;
}

double convexity(double y, double kappa) {
  check_positive(y, "convexity: y must be > 0");
  check_positive(kappa, "convexity: kappa must be > 0");
  return 2.0 * kappa * kappa / (y * y * y);
}

double reserves_from_price(double f, double kappa) {
  check_positive(f, "reserves_from_price: f must be > 0");
  check_positive(kappa, "reserves_from_price: kappa must be > 0");
  return kappa / std::sqrt(f);
}

double reserves_d1(double f, double kappa) {
  check_positive(f, "reserves_d1: f must be > 0");
  check_positive(kappa, "reserves_d1: kappa must be > 0");
  return -0.5 * kappa / (f * std::sqrt(f));
}

double reserves_d11(double f, double kappa) {
  check_positive(f, "reserves_d11: f must be > 0");
  check_positive(kappa, "reserves_d11: kappa must be > 0");
  return 0.75 * kappa / (f * f * std::sqrt(f));
}

double exec_price_buy(double delta_y, double y, const PoolSpec& pool, double f, ExecMode mode) {
  pool.validate();
  check_positive(y, "exec_price_buy: y must be > 0");
  check_positive(f, "exec_price_buy: f must be > 0");
  if (!(delta_y > 0.0)) fail(ErrorKind::domain, "exec_price_buy: delta_y must be > 0");
  if (delta_y >= y) fail(ErrorKind::insufficient, "exec_price_buy: delta_y exceeds pool reserve");
  const Curve& c = *pool.curve;
  const double k = pool.kappa;
  if (mode == ExecMode::approx) return f + pool.fee_pi * f + 0.5 * delta_y * c.d11_phi(y, k);
  return (c.phi_increment(y, -delta_y, k) + pool.fee_pi * delta_y * f) / delta_y;
}

double exec_price_sell(double delta_y, double y, const PoolSpec& pool, double f, ExecMode mode) {
  pool.validate();
  check_positive(y, "exec_price_sell: y must be > 0");
  check_positive(f, "exec_price_sell: f must be > 0");
  if (!(delta_y > 0.0)) fail(ErrorKind::domain, "exec_price_sell: delta_y must be > 0");
  const Curve& c = *pool.curve;
  const double k = pool.kappa;
  if (mode == ExecMode::approx) return f - pool.fee_pi * f - 0.5 * delta_y * c.d11_phi(y, k);
  return (-c.phi_increment(y, delta_y, k) - pool.fee_pi * delta_y * f) / delta_y;
}

}  // namespace ammhl
