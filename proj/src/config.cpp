#include "ammhl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ammhl/csv_io.hpp"
#include "ammhl/errors.hpp"

namespace ammhl {

namespace {

const std::vector<std::pair<std::string, std::string>> kExclusive = {
    {"hedge.phi", "hedge.ratio"}, {"flow.gamma", "flow.lambda"}};

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    fail(ErrorKind::config, "config: " + key + " is not a number: '" + s + "'");
  return v;
}

std::size_t to_size(const std::string& key, const std::string& s) {
  unsigned long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(ErrorKind::config, "config: " + key + " is not a count: '" + s + "'");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(ErrorKind::config, "config: " + key + " is not a boolean: '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r\n"));
  const auto e = s.find_last_not_of(" \t\r\n");
  s.erase(e == std::string::npos ? 0 : e + 1);
  return s;
}

void check_key(const std::string& key) {
  const auto& keys = known_config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    fail(ErrorKind::config, "config: unknown key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "market.f0",    "market.sigma",   "market.horizon_T",   "market.kappa",     "market.signal",
      "market.signal_a", "market.theta", "market.mu",         "market.xi",        "market.a0",
      "hedge.eta",    "hedge.phi",      "hedge.ratio",        "hedge.c",          "hedge.beta_res",
      "hedge.q0",     "flow.gamma",     "flow.lambda",        "flow.fee_pi",      "flow.valuation",
      "flow.v_bar",   "flow.eps",       "grid.n_steps",       "grid.n_paths",     "grid.seed",
      "grid.kappa_max", "grid.kappa_grid_n", "grid.dre_mesh_n", "grid.checkpoints", "sweep.kind",
      "sweep.parameter", "sweep.values", "outputs.dir",       "outputs.csv",      "outputs.json"};
  return keys;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> p = {
      "market.sigma", "market.horizon_T", "market.signal_a", "market.a0", "market.xi",
      "market.theta", "market.kappa",     "hedge.ratio",     "hedge.eta", "hedge.phi",
      "hedge.c",      "hedge.beta_res",   "flow.gamma",      "flow.fee_pi"};
  return p;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  check_key(key);
  for (const auto& [a, b] : kExclusive) {
    if (key == a) values_.erase(b);
    if (key == b) values_.erase(a);
  }
  values_[key] = trim(value);
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorKind::config, "config: override must look like section.key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ExperimentConfig ExperimentConfig::parse(const std::string& ini_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      fail(ErrorKind::config, "config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      check_key(full);
      cfg.values_[full] = trim(node.data());
    }
  }
  for (const auto& [a, b] : kExclusive)
    if (cfg.has(a) && cfg.has(b)) fail(ErrorKind::config, "config: set only one of " + a + " and " + b);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream out;
  std::string current;
  for (const auto& [full, value] : values_) {
    const auto dot = full.find('.');
    const std::string section = full.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << full.substr(dot + 1) << " = " << value << '\n';
  }
  return out.str();
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "config: cannot write " + path);
  out << to_ini();
}

ResolvedConfig ExperimentConfig::resolve() const {
  ResolvedConfig r;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = values_.find(k);
    return it == values_.end() ? nullptr : &it->second;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = to_double(k, *v);
  };
  auto count = [&](const std::string& k, std::size_t& dst) {
    if (auto v = get(k)) dst = to_size(k, *v);
  };

  num("market.f0", r.market.f0);
  num("market.sigma", r.market.sigma);
  num("market.horizon_T", r.market.horizon_T);
  num("market.kappa", r.kappa);
  const std::string signal = get("market.signal") ? *get("market.signal") : "zero";
  double sa = 0.0, theta = 1.0, mu = 0.0, xi = 0.0, a0 = 0.0;
  num("market.signal_a", sa);
  num("market.theta", theta);
  num("market.mu", mu);
  num("market.xi", xi);
  num("market.a0", a0);
  if (signal == "zero") r.market.signal = SignalModel::none();
  else if (signal == "constant") r.market.signal = SignalModel::constant(sa);
  else if (signal == "ou") r.market.signal = SignalModel::ou(theta, mu, xi, a0);
  else fail(ErrorKind::config, "config: market.signal must be zero, constant or ou");

  num("hedge.eta", r.hedge.eta);
  num("hedge.c", r.hedge.c);
  num("hedge.beta_res", r.hedge.beta_res);
  if (get("hedge.q0")) r.hedge.q0 = to_double("hedge.q0", *get("hedge.q0"));
  if (get("hedge.phi")) {
    r.hedge.phi = to_double("hedge.phi", *get("hedge.phi"));
    r.ratio = r.hedge.phi / r.hedge.eta;
  } else {
    num("hedge.ratio", r.ratio);
    r.hedge.phi = r.ratio * r.hedge.eta;
  }

  double fee_pi = 0.003, v_bar = -1.0, eps = 1e-3;
  num("flow.fee_pi", fee_pi);
  num("flow.v_bar", v_bar);
  num("flow.eps", eps);
  const std::string law = get("flow.valuation") ? *get("flow.valuation") : "uniform";
  ValuationLaw::Kind kind = ValuationLaw::Kind::uniform;
  if (law == "two_point") kind = ValuationLaw::Kind::two_point;
  else if (law == "point_mass") kind = ValuationLaw::Kind::point_mass;
  else if (law != "uniform") fail(ErrorKind::config, "config: flow.valuation must be uniform, two_point or point_mass");
  if (kind != ValuationLaw::Kind::uniform && v_bar < 0.0)
    fail(ErrorKind::config, "config: flow.v_bar is required for " + law);
  try {
    ValuationLaw vl = ValuationLaw::uniform(fee_pi);
    if (kind == ValuationLaw::Kind::two_point) vl = ValuationLaw::two_point(fee_pi, v_bar, eps);
    if (kind == ValuationLaw::Kind::point_mass) vl = ValuationLaw::point_mass(fee_pi, v_bar);
    if (get("flow.lambda")) {
      r.flow.fee_pi = fee_pi;
      r.flow.valuation = vl;
      r.flow.lambda = to_double("flow.lambda", *get("flow.lambda"));
      r.gamma = r.flow.gamma();
    } else {
      num("flow.gamma", r.gamma);
      r.flow = FlowParams::from_gamma(r.gamma, fee_pi, kind, vl.v_bar);
    }
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }

  count("grid.n_steps", r.grid.n_steps);
  count("grid.n_paths", r.grid.n_paths);
  if (auto v = get("grid.seed")) r.grid.seed = to_size("grid.seed", *v);
  num("grid.kappa_max", r.kappa_max);
  count("grid.kappa_grid_n", r.kappa_grid_n);
  count("grid.dre_mesh_n", r.dre_mesh_n);
  count("grid.checkpoints", r.checkpoints);

  if (auto v = get("sweep.kind")) r.sweep_kind = *v;
  static const std::vector<std::string> kinds = {"liquidity", "paths", "distribution", "signal"};
  if (std::find(kinds.begin(), kinds.end(), r.sweep_kind) == kinds.end())
    fail(ErrorKind::config, "config: sweep.kind must be liquidity, paths, distribution or signal");
  if (auto v = get("sweep.parameter")) {
    r.sweep_parameter = *v;
    const auto& ok = sweep_parameters();
    if (!r.sweep_parameter.empty() && std::find(ok.begin(), ok.end(), r.sweep_parameter) == ok.end())
      fail(ErrorKind::config, "config: unsupported sweep parameter '" + r.sweep_parameter + "'");
  }
  if (auto v = get("sweep.values")) r.sweep_values = to_list("sweep.values", *v);
  if (!r.sweep_values.empty() && r.sweep_parameter.empty())
    fail(ErrorKind::config, "config: sweep.values given without sweep.parameter");

  if (auto v = get("outputs.dir")) r.out_dir = *v;
  if (auto v = get("outputs.csv")) r.csv = to_bool("outputs.csv", *v);
  if (auto v = get("outputs.json")) r.json = to_bool("outputs.json", *v);

  try {
    r.market.validate();
    r.hedge.validate();
    r.flow.validate();
    r.grid.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::domain) fail(ErrorKind::config, std::string("config: ") + e.what());
    throw;
  }
  if (!(r.kappa >= 0.0)) fail(ErrorKind::config, "config: market.kappa must be >= 0");
  return r;
}

std::vector<std::string> describe(const ResolvedConfig& c) {
  std::vector<std::string> out;
  auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + "=" + v); };
  auto addd = [&](const std::string& k, double v) { add(k, format_double(v)); };
  addd("market.f0", c.market.f0);
  addd("market.sigma", c.market.sigma);
  addd("market.horizon_T", c.market.horizon_T);
  addd("market.kappa", c.kappa);
  add("market.signal", c.market.signal.name());
  if (c.market.signal.kind == SignalModel::Kind::constant) addd("market.signal_a", c.market.signal.a);
  if (c.market.signal.kind == SignalModel::Kind::ou) {
    addd("market.theta", c.market.signal.theta);
    addd("market.mu", c.market.signal.mu);
    addd("market.xi", c.market.signal.xi);
    addd("market.a0", c.market.signal.a0);
  }
  addd("hedge.eta", c.hedge.eta);
  addd("hedge.phi", c.hedge.phi);
  addd("hedge.ratio", c.ratio);
  addd("hedge.c", c.hedge.c);
  addd("hedge.beta_res", c.hedge.beta_res);
  if (c.hedge.q0) addd("hedge.q0", *c.hedge.q0);
  addd("flow.gamma", c.gamma);
  addd("flow.lambda", c.flow.lambda);
  addd("flow.fee_pi", c.flow.fee_pi);
  add("flow.valuation", c.flow.valuation.name());
  addd("flow.v_bar", c.flow.v_bar());
  add("grid.n_steps", std::to_string(c.grid.n_steps));
  add("grid.n_paths", std::to_string(c.grid.n_paths));
  add("grid.seed", std::to_string(c.grid.seed));
  addd("grid.kappa_max", c.kappa_max);
  add("grid.kappa_grid_n", std::to_string(c.kappa_grid_n));
  add("grid.dre_mesh_n", std::to_string(c.dre_mesh_n));
  add("grid.checkpoints", std::to_string(c.checkpoints));
  add("sweep.kind", c.sweep_kind);
  add("sweep.parameter", c.sweep_parameter);
  std::string vals;
  for (std::size_t k = 0; k < c.sweep_values.size(); ++k)
    vals += (k ? "," : "") + format_double(c.sweep_values[k]);
  add("sweep.values", vals);
  return out;
}

}  // namespace ammhl
