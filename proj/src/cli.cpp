#include "ammhl/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ammhl/config.hpp"
#include "ammhl/csv_io.hpp"
#include "ammhl/errors.hpp"
#include "ammhl/experiments.hpp"
#include "ammhl/parallel.hpp"
#include "ammhl/riccati.hpp"
#include "ammhl/version.hpp"

namespace ammhl {

namespace {

namespace fs = std::filesystem;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::convergence:
    case ErrorKind::consistency: return 3;
    default: return 2;
  }
}

void report(const std::string& kind, const std::string& msg) {
  nlohmann::json j = {{"status", "error"}, {"kind", kind}, {"message", msg}};
  std::cerr << j.dump() << std::endl;
}

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = -1;
  int threads = 0;
};

ExperimentConfig build_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(c.config);
  for (const std::string& s : c.sets) cfg.apply_override(s);
  if (c.seed >= 0) cfg.set("grid.seed", std::to_string(c.seed));
  if (!c.out.empty()) cfg.set("outputs.dir", c.out);
  return cfg;
}

std::string out_file(const ResolvedConfig& r, const std::string& name) {
  return (fs::path(r.out_dir) / name).string();
}

std::vector<std::string> run(const std::string& cmd, const ExperimentConfig& cfg) {
  const ResolvedConfig r = cfg.resolve();
  ensure_directory(r.out_dir);
  std::vector<std::string> files;
  if (cmd == "simulate") {
    files = {out_file(r, "paths.csv"), out_file(r, "fees.csv")};
    write_paths_csv(r, files[0], files[1]);
  } else if (cmd == "hedge-path") {
    files = {out_file(r, "hedge.csv")};
    write_hedge_csv(r, files[0]);
  } else if (cmd == "riccati") {
    const RiccatiSolution sol = solve_dre(r.hedge, r.market.horizon_T, r.dre_mesh_n);
    if (r.csv) {
      files.push_back(out_file(r, "riccati.csv"));
      CsvWriter w(files.back(), header_comments(describe(r)), {"t", "P11", "P12", "P21", "P22"});
      for (std::size_t k = 0; k < sol.grid.size(); ++k) {
        const Mat2& p = sol.P_mat[k];
        w.row({sol.grid[k], p(0, 0), p(0, 1), p(1, 0), p(1, 1)});
      }
      w.close();
    }
    nlohmann::json j = {{"version", kVersion},
                        {"mesh_n", sol.mesh_n},
                        {"residual_sup", sol.residual_sup},
                        {"P0", {sol.P_mat[0](0, 0), sol.P_mat[0](0, 1), sol.P_mat[0](1, 0), sol.P_mat[0](1, 1)}}};
    files.push_back(out_file(r, "riccati.json"));
    write_text(files.back(), j.dump(2) + "\n");
  } else if (cmd == "liquidity") {
    const StageOneResult res = solve_stage_one(r);
    files.push_back(out_file(r, "liquidity.json"));
    write_text(files.back(), to_json(res).dump(2) + "\n");
    if (!res.mc_value_curve.empty() && r.csv) {
      files.push_back(out_file(r, "value_curve.csv"));
      CsvWriter w(files.back(), header_comments(describe(r)), {"kappa", "value", "se"});
      for (const ValuePoint& v : res.mc_value_curve) w.row({v.kappa, v.value, v.se});
      w.close();
    }
  } else if (cmd == "sweep") {
    files = run_figure_sweep(cfg);
  } else if (cmd == "decompose") {
    const Distribution d = run_distribution(r);
    files.push_back(out_file(r, "wealth.csv"));
    write_distribution_csv(r, d, files.back());
    files.push_back(out_file(r, "wealth.json"));
    write_text(files.back(), summary_json(d).dump(2) + "\n");
  }
  return files;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"AMM liquidity provision with CEX risk offsetting"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common common;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "simulate price, signal and reserve paths with fee accrual"},
      {"hedge-path", "optimal CEX strategy along simulated paths"},
      {"riccati", "solve the matrix Riccati equation"},
      {"liquidity", "equilibrium liquidity depth"},
      {"sweep", "parameter sweeps (liquidity, paths, distribution, signal)"},
      {"decompose", "pathwise wealth decomposition"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config, "INI configuration file");
    sub->add_option("--set", common.sets, "section.key=value overrides")->expected(1, -1);
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--threads", common.threads, "worker threads (default AMMHL_THREADS)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("config", e.what());
    return 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (common.threads > 0) set_thread_count(common.threads);
    const ExperimentConfig cfg = build_config(common);
    const std::vector<std::string> files = run(cmd, cfg);
    nlohmann::json j = {{"status", "ok"}, {"command", cmd}, {"files", files}};
    std::cout << j.dump() << std::endl;
    return 0;
  } catch (const Error& e) {
    report(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report("internal", e.what());
    return 3;
  }
}

}  // namespace ammhl
