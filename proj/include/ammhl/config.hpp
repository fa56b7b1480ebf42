#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ammhl/hedging.hpp"
#include "ammhl/market_dynamics.hpp"
#include "ammhl/noise_flow.hpp"

namespace ammhl {

// Typed view of a configuration after defaults and the phi/ratio and
// gamma/lambda rules have been applied.
struct ResolvedConfig {
  MarketModel market;
  double kappa = 0.0;  // depth for path runs; 0 means use the equilibrium depth
  HedgeParams hedge;
  double ratio = 10.0;  // phi / eta
  FlowParams flow;
  double gamma = 0.2;
  SimGrid grid;
  double kappa_max = 0.0;
  std::size_t kappa_grid_n = 0;
  std::size_t dre_mesh_n = 4000;
  std::size_t checkpoints = 10;
  std::string sweep_kind = "liquidity";
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::string out_dir = ".";
  bool csv = true;
  bool json = true;
};

// Flat key/value configuration, sections market/hedge/flow/grid/sweep/outputs.
// Only keys that were set explicitly are stored, so save/load is lossless.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& ini_text);
  static ExperimentConfig load(const std::string& path);

  // "section.key" = value. Setting hedge.phi drops hedge.ratio and vice versa;
  // the same for flow.gamma and flow.lambda.
  void set(const std::string& key, const std::string& value);
  // "section.key=value"
  void apply_override(const std::string& assignment);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void erase(const std::string& key) { values_.erase(key); }

  std::string to_ini() const;
  void save(const std::string& path) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  ResolvedConfig resolve() const;

  bool operator==(const ExperimentConfig& o) const { return values_ == o.values_; }

 private:
  std::map<std::string, std::string> values_;
};

const std::vector<std::string>& known_config_keys();
const std::vector<std::string>& sweep_parameters();

// "key=value" lines of every resolved setting, for file headers.
std::vector<std::string> describe(const ResolvedConfig& cfg);

}  // namespace ammhl
