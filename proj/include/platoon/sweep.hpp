#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/config.hpp"
#include "platoon/metrics.hpp"
#include "platoon/sim.hpp"

namespace platoon {

/// FNV-1a, 64 bit. Stable across platforms and runs.
[[nodiscard]] std::uint64_t stable_hash(std::string_view text);

/// base + hash of the scenario coordinates (currently the leader period p).
/// Controller coordinates (model, a, b) are excluded so that every controller
/// at the same scenario point sees identical initial draws. With no scenario
/// coordinate the base seed is used unchanged.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::optional<double> p);

/// Replaces the sweep axes with those of the named preset.
[[nodiscard]] RunConfig apply_preset(RunConfig cfg);

struct GridPoint {
  std::size_t index = 0;
  RunConfig config;  // fully resolved single run, sweep cleared
  std::optional<double> p;  // set when p is a swept axis
};

/// Cartesian product model x a x b x p (outermost first). Absent axes use the
/// base values. Throws ConfigError when the product exceeds max_runs.
[[nodiscard]] std::vector<GridPoint> expand_grid(const RunConfig& base);

/// Runs one configuration through the matching scenario.
[[nodiscard]] Trajectory run(const RunConfig& cfg);

struct SweepRow {
  GridPoint point;
  std::optional<MetricsReport> metrics;
  std::size_t negative_headway_events = 0;
  std::string status = "ok";  // "ok" or the error message
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  bool all_ok = true;
};

/// Runs every grid point on a worker pool. With `out_dir` each run writes
/// runs/run-NNNN/{trajectory.csv,summary.json} and the aggregate goes to
/// aggregate.csv; all writes are atomic.
[[nodiscard]] SweepOutcome run_sweep(const RunConfig& base,
                                     const std::optional<std::filesystem::path>& out_dir);

/// Header plus one row per grid point, in grid order.
[[nodiscard]] std::string aggregate_csv(const SweepOutcome& outcome);

}  // namespace platoon
