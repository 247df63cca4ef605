#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "platoon/error.hpp"
#include "platoon/sweep.hpp"
#include "support.hpp"

using namespace platoon;

namespace {

RunConfig with_preset(const std::string& name) {
  auto cfg = default_config(*preset_scenario(name));
  cfg.sweep.emplace();
  cfg.sweep->preset = name;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("FNV-1a reference values") {
    CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(stable_hash("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("seed derivation") {
    CHECK(derive_seed(42, std::nullopt) == 42);
    CHECK(derive_seed(42, 5.0) == derive_seed(42, 5.0));
    CHECK(derive_seed(42, 5.0) != derive_seed(42, 10.0));
    CHECK(derive_seed(42, 5.0) != derive_seed(43, 5.0));
  }

  TEST_CASE("table1 preset: 8 runs over a x p") {
    const auto grid = expand_grid(with_preset("table1"));
    REQUIRE(grid.size() == 8);
    std::set<std::pair<double, double>> coords;
    for (const auto& g : grid) {
      CHECK(g.config.model == ModelKind::POvm);
      CHECK(g.config.scenario == ScenarioKind::Infinite);
      CHECK(g.p.has_value());
      CHECK(g.config.leader.period == *g.p);
      CHECK_FALSE(g.config.sweep.has_value());
      coords.insert({g.config.a, *g.p});
    }
    CHECK(coords == std::set<std::pair<double, double>>{{1.2, 5}, {1.2, 10}, {1.2, 15}, {1.2, 20},
                                                        {2.4, 5}, {2.4, 10}, {2.4, 15}, {2.4, 20}});
  }

  TEST_CASE("sim1.1 preset: OVM and P-OVM share every seed") {
    const auto grid = expand_grid(with_preset("sim1.1"));
    REQUIRE(grid.size() == 8);
    for (const auto& g : grid) CHECK(g.config.seed == 42);
    // Same initial conditions for both models at every a.
    for (std::size_t i = 0; i < 4; ++i) {
      auto ovm = grid[i].config;
      auto povm = grid[i + 4].config;
      CHECK(ovm.model == ModelKind::Ovm);
      CHECK(povm.model == ModelKind::POvm);
      CHECK(ovm.a == povm.a);
      ovm.t_end = povm.t_end = 0.1;
      CHECK(run(ovm).x.front() == run(povm).x.front());
      CHECK(run(ovm).v.front() == run(povm).v.front());
    }
  }

  TEST_CASE("controllers share seeds at the same scenario point") {
    auto cfg = default_config(ScenarioKind::Infinite);
    cfg.sweep.emplace();
    cfg.sweep->models = std::vector<ModelKind>{ModelKind::Ovm, ModelKind::POvm};
    cfg.sweep->a = std::vector<double>{1.0, 2.0};
    cfg.sweep->p = std::vector<double>{5.0, 10.0};
    const auto grid = expand_grid(cfg);
    REQUIRE(grid.size() == 8);
    for (const auto& g : grid) CHECK(g.config.seed == derive_seed(42, *g.p));
  }

  TEST_CASE("empty axis gives an empty grid and a header-only aggregate") {
    auto cfg = default_config(ScenarioKind::Ring);
    cfg.sweep.emplace();
    cfg.sweep->a = std::vector<double>{};
    CHECK(expand_grid(cfg).empty());
    const auto dir = test::scratch("sweep_empty");
    const auto outcome = run_sweep(cfg, dir);
    CHECK(outcome.rows.empty());
    const auto csv = slurp(dir / "aggregate.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    CHECK(csv.rfind("run,scenario,model,a,b,p,seed,status,avg_oscillation", 0) == 0);
  }

  TEST_CASE("grid cap is enforced") {
    auto cfg = default_config(ScenarioKind::Ring);
    cfg.sweep.emplace();
    cfg.sweep->a = std::vector<double>{0.5, 1.0, 1.5};
    cfg.sweep->b = std::vector<double>{0.0, 0.1};
    cfg.sweep->models = std::vector<ModelKind>{ModelKind::TOvm};
    cfg.sweep->max_runs = 5;
    CHECK_THROWS_AS((void)expand_grid(cfg), ConfigError);
    cfg.sweep->max_runs = 6;
    CHECK(expand_grid(cfg).size() == 6);
  }

  TEST_CASE("p axis needs the open road") {
    auto cfg = default_config(ScenarioKind::Ring);
    cfg.sweep.emplace();
    cfg.sweep->p = std::vector<double>{5.0};
    CHECK_THROWS_AS((void)expand_grid(cfg), ConfigError);
  }

  TEST_CASE("invalid grid points are reported per row") {
    auto cfg = default_config(ScenarioKind::Ring);
    cfg.t_end = 1.0;
    cfg.sweep.emplace();
    cfg.sweep->a = std::vector<double>{1.0, -1.0};
    const auto outcome = run_sweep(cfg, std::nullopt);
    REQUIRE(outcome.rows.size() == 2);
    CHECK(outcome.rows[0].status == "ok");
    CHECK(outcome.rows[1].status != "ok");
    CHECK_FALSE(outcome.all_ok);
    CHECK(aggregate_csv(outcome).find(",ok,") != std::string::npos);
  }

  TEST_CASE("worker count does not change results") {
    auto cfg = with_preset("table1");
    cfg.sweep->workers = 1;
    const auto d1 = test::scratch("sweep_w1");
    (void)run_sweep(cfg, d1);
    cfg.sweep->workers = 4;
    const auto d4 = test::scratch("sweep_w4");
    (void)run_sweep(cfg, d4);
    CHECK(slurp(d1 / "aggregate.csv") == slurp(d4 / "aggregate.csv"));
    CHECK(slurp(d1 / "runs/run-0003/trajectory.csv") == slurp(d4 / "runs/run-0003/trajectory.csv"));
    CHECK(std::filesystem::exists(d4 / "runs/run-0007/summary.json"));
  }
}
