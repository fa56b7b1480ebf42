#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "ammhl/cli.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "ammhl");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return ammhl::cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ammhl_cli_" + name);
  fs::remove_all(d);
  return d;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate with a config file and overrides") {
    const fs::path dir = scratch("simulate");
    fs::create_directories(dir);
    {
      std::ofstream cfg(dir / "base.cfg");
      cfg << "[grid]\nn_paths = 4\nn_steps = 20\n[market]\nkappa = 2\n";
    }
    const fs::path out = dir / "run1";
    CHECK(run({"simulate", "--config", (dir / "base.cfg").string(), "--set", "market.sigma=0.2", "--out",
               out.string(), "--seed", "5"}) == 0);
    CHECK(fs::exists(out / "paths.csv"));
    CHECK(fs::exists(out / "fees.csv"));
    std::ifstream in(out / "paths.csv");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("# market.sigma=0.20000000000000001") != std::string::npos);
    CHECK(text.find("# grid.seed=5") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    const fs::path dir = scratch("codes");
    CHECK(run({"riccati", "--set", "hedge.c=1", "hedge.eta=0.01", "hedge.phi=0.1", "--out", dir.string()}) == 2);
    CHECK(run({"riccati", "--set", "hedge.c=0.02", "--out", dir.string()}) == 0);
    CHECK(fs::exists(dir / "riccati.csv"));
    // coarse mesh that four refinements cannot rescue
    CHECK(run({"riccati", "--set", "hedge.c=0.02", "grid.dre_mesh_n=4", "--out", dir.string()}) == 3);
    CHECK(run({"liquidity", "--set", "market.vol=1", "--out", dir.string()}) == 2);
    CHECK(run({"liquidity", "--set", "market.sigma", "--out", dir.string()}) == 2);
    CHECK(run({"liquidity", "--config", (dir / "missing.cfg").string()}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"hedge-path", "--set", "market.signal=ou", "hedge.c=0.01", "market.kappa=1", "grid.n_paths=2",
               "grid.n_steps=10", "--out", dir.string()}) == 2);
  }

  TEST_CASE("liquidity matches the stored value") {
    const fs::path dir = scratch("liquidity");
    REQUIRE(run({"liquidity", "--out", dir.string()}) == 0);
    const nlohmann::json got = read_json(dir / "liquidity.json");
    const nlohmann::json golden = read_json(fs::path(AMMHL_GOLDEN_DIR) / "liquidity_fig1.json");
    CHECK(got["kappa_star"].get<double>() == doctest::Approx(golden["kappa_star"].get<double>()).epsilon(1e-12));
    CHECK(got["kappa_ref"].get<double>() == doctest::Approx(golden["kappa_ref"].get<double>()).epsilon(1e-12));
  }

  TEST_CASE("decompose") {
    const fs::path dir = scratch("decompose");
    CHECK(run({"decompose", "--set", "grid.n_paths=50", "grid.n_steps=100", "flow.gamma=0.25", "--out",
               dir.string(), "--threads", "2"}) == 0);
    const nlohmann::json j = read_json(dir / "wealth.json");
    CHECK(j.contains("hedged"));
  }
}
