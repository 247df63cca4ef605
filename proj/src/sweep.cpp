#include "platoon/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "platoon/error.hpp"
#include "platoon/output.hpp"

namespace platoon {

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::optional<double> p) {
  if (!p) return base;
  char buf[48];
  std::snprintf(buf, sizeof buf, "p=%.17g", *p);
  return base + stable_hash(buf);
}

RunConfig apply_preset(RunConfig cfg) {
  if (!cfg.sweep || !cfg.sweep->preset) return cfg;
  const std::string name = *cfg.sweep->preset;
  const auto scenario = preset_scenario(name);
  if (!scenario) throw ConfigError("unknown preset '" + name + "'");
  if (cfg.scenario != *scenario)
    throw ConfigError("preset '" + name + "' needs scenario " + std::string(to_string(*scenario)));
  auto& s = *cfg.sweep;
  s.b.reset();
  if (name == "table1") {
    s.models = std::vector<ModelKind>{ModelKind::POvm};
    s.a = std::vector<double>{1.2, 2.4};
    s.p = std::vector<double>{5.0, 10.0, 15.0, 20.0};
  } else {
    s.models = std::vector<ModelKind>{ModelKind::Ovm, ModelKind::POvm};
    s.a = std::vector<double>{0.4, 0.8, 1.6, 2.4};
    s.p.reset();
  }
  cfg.b = 0.0;
  return cfg;
}

std::vector<GridPoint> expand_grid(const RunConfig& raw) {
  const RunConfig base = apply_preset(raw);
  SweepSpec spec = base.sweep.value_or(SweepSpec{});
  if (spec.p && base.scenario != ScenarioKind::Infinite)
    throw ConfigError("sweep axis 'p' needs the infinite scenario");

  const auto models = spec.models.value_or(std::vector<ModelKind>{base.model});
  const auto as = spec.a.value_or(std::vector<double>{base.a});
  const auto bs = spec.b.value_or(std::vector<double>{base.b});
  const std::vector<std::optional<double>> ps = [&] {
    std::vector<std::optional<double>> out;
    if (!spec.p) out.push_back(std::nullopt);
    else for (double p : *spec.p) out.emplace_back(p);
    return out;
  }();

  const std::size_t total = models.size() * as.size() * bs.size() * ps.size();
  if (total > spec.max_runs)
    throw ConfigError("sweep grid has " + std::to_string(total) + " points, above the cap of " +
                      std::to_string(spec.max_runs) + " (raise sweep.max_runs)");

  std::vector<GridPoint> grid;
  grid.reserve(total);
  for (auto m : models)
    for (double a : as)
      for (double b : bs)
        for (const auto& p : ps) {
          GridPoint g;
          g.index = grid.size();
          g.config = base;
          g.config.sweep.reset();
          g.config.model = m;
          g.config.a = a;
          g.config.b = b;
          if (p) g.config.leader.period = *p;
          g.config.seed = derive_seed(base.seed, p);
          g.p = p;
          grid.push_back(std::move(g));
        }
  return grid;
}

Trajectory run(const RunConfig& cfg) {
  if (cfg.scenario == ScenarioKind::Ring) return run_ring(ring_scenario(cfg), sim_config(cfg));
  return run_infinite(infinite_scenario(cfg), sim_config(cfg));
}

namespace {

SweepRow run_point(const GridPoint& g, const std::optional<std::filesystem::path>& out_dir) {
  SweepRow row;
  row.point = g;
  try {
    validate(g.config);
    const auto traj = run(g.config);
    row.metrics = summarize(traj);
    row.negative_headway_events = static_cast<std::size_t>(std::count_if(
        traj.events.begin(), traj.events.end(), [](const Event& e) { return e.kind == EventKind::NegativeHeadway; }));
    if (out_dir) {
      char name[32];
      std::snprintf(name, sizeof name, "run-%04zu", g.index);
      const auto dir = *out_dir / "runs" / name;
      write_atomic(dir / "trajectory.csv", trajectory_csv(traj));
      write_atomic(dir / "summary.json", run_summary(g.config, *row.metrics, traj.events).dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    row.status = e.what();
  }
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

SweepOutcome run_sweep(const RunConfig& base, const std::optional<std::filesystem::path>& out_dir) {
  const auto grid = expand_grid(base);
  SweepOutcome outcome;
  outcome.rows.resize(grid.size());

  std::size_t workers = base.sweep ? base.sweep->workers : 0;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(grid.size(), 1));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) outcome.rows[i] = run_point(grid[i], out_dir);
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  outcome.all_ok = std::all_of(outcome.rows.begin(), outcome.rows.end(),
                               [](const SweepRow& r) { return r.status == "ok"; });
  if (out_dir) write_atomic(*out_dir / "aggregate.csv", aggregate_csv(outcome));
  return outcome;
}

std::string aggregate_csv(const SweepOutcome& outcome) {
  std::string out =
      "run,scenario,model,a,b,p,seed,status,avg_oscillation,convergence_time,min_headway,"
      "first_collision_time,max_abs_accel,negative_headway_events\n";
  for (const auto& row : outcome.rows) {
    const auto& c = row.point.config;
    out += std::to_string(row.point.index) + ',' + std::string(to_string(c.scenario)) + ',' +
           std::string(to_string(c.model)) + ',' + format_number(c.a) + ',' + format_number(c.b) + ',' +
           optional_field(row.point.p) + ',' + std::to_string(c.seed) + ',' + csv_field(row.status) + ',';
    if (row.metrics) {
      const auto& m = *row.metrics;
      out += format_number(m.avg_oscillation) + ',' + optional_field(m.convergence_time) + ',' +
             format_number(m.min_headway) + ',' + optional_field(m.first_collision_time) + ',' +
             format_number(m.max_abs_accel) + ',' + std::to_string(row.negative_headway_events);
    } else {
      out += ",,,,,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace platoon
