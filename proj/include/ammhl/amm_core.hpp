#pragma once

#include <memory>
#include <string>

namespace ammhl {

// Bonding curve seen through its level function phi(y, kappa) and the
// reserve map h(f, kappa) obtained by aligning the marginal price with f.
class Curve {
 public:
  virtual ~Curve() = default;
  virtual std::string name() const = 0;

  virtual double phi(double y, double kappa) const = 0;
  virtual double d1_phi(double y, double kappa) const = 0;
  virtual double d11_phi(double y, double kappa) const = 0;
  // phi(y + dy) - phi(y); override when the difference cancels
  virtual double phi_increment(double y, double dy, double kappa) const {
    return phi(y + dy, kappa) - phi(y, kappa);
  }

  virtual double h(double f, double kappa) const = 0;
  virtual double d1_h(double f, double kappa) const = 0;
  virtual double d11_h(double f, double kappa) const = 0;
};

// x * y = kappa^2
class ConstantProduct final : public Curve {
 public:
  std::string name() const override { return "constant_product"; }
  double phi(double y, double kappa) const override;
  double d1_phi(double y, double kappa) const override;
  double d11_phi(double y, double kappa) const override;
  double phi_increment(double y, double dy, double kappa) const override;
  double h(double f, double kappa) const override;
  double d1_h(double f, double kappa) const override;
  double d11_h(double f, double kappa) const override;
};

std::shared_ptr<const Curve> constant_product();

struct PoolSpec {
  double kappa = 1.0;
  double fee_pi = 0.003;
  std::shared_ptr<const Curve> curve = constant_product();

  void validate() const;
};

struct CurveEval {
  double x_reserve;
  double y_reserve;
  double marginal_price;
  double convexity;
};

CurveEval evaluate(const PoolSpec& pool, double y);

// Constant-product closed forms. All throw Error(domain) on non-positive input.
double level_value(double y, double kappa);
double marginal_price(double y, double kappa);
double convexity(double y, double kappa);
double reserves_from_price(double f, double kappa);
double reserves_d1(double f, double kappa);
double reserves_d11(double f, double kappa);

enum class ExecMode { exact, approx };

// Average price per unit paid by a taker buying delta_y of the risky asset.
// f is the pre-trade marginal price; the fee is charged on delta_y * f.
double exec_price_buy(double delta_y, double y, const PoolSpec& pool, double f,
                      ExecMode mode = ExecMode::exact);
// Average price per unit received by a taker selling delta_y.
double exec_price_sell(double delta_y, double y, const PoolSpec& pool, double f,
                       ExecMode mode = ExecMode::exact);

}  // namespace ammhl
