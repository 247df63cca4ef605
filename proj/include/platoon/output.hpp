#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "platoon/config.hpp"
#include "platoon/metrics.hpp"
#include "platoon/sim.hpp"
#include "platoon/stability.hpp"

namespace platoon {

/// printf "%.9g"; NaN is written as "nan" and infinities as "inf"/"-inf".
[[nodiscard]] std::string format_number(double x);

/// Header `t,vehicle,x,v,h`, one row per vehicle per record, vehicles 1-based
/// from the rear, LF line endings. The open-road leader's headway is "nan".
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);

/// Header `vprime,fraction,s_threshold`, one row per sampled point.
[[nodiscard]] std::string neutral_line_csv(std::span<const NeutralLine> lines);

[[nodiscard]] nlohmann::json to_json(const MetricsReport& m);
[[nodiscard]] nlohmann::json to_json(std::span<const Event> events);

/// Metrics, event log, config echo and seed.
[[nodiscard]] nlohmann::json run_summary(const RunConfig& cfg, const MetricsReport& m,
                                         std::span<const Event> events);

enum class SeriesKind { Headway, Velocity };

/// Minimal self-contained SVG line chart, one polyline per vehicle.
[[nodiscard]] std::string svg_chart(const Trajectory& traj, SeriesKind kind);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file. Creates parent directories. Throws IoError.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace platoon
