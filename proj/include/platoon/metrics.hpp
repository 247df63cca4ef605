#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "platoon/sim.hpp"

namespace platoon {

struct MetricsReport {
  double avg_oscillation = 0.0;                 // m
  std::vector<double> per_vehicle_oscillation;  // m
  std::optional<double> convergence_time;       // s
  double min_headway = 0.0;                     // m
  std::optional<double> first_collision_time;   // s
  double max_abs_accel = 0.0;                   // m/s^2
};

struct Window {
  double t0;
  double t1;
};

/// Default post-transient window for the open-road scenario.
inline constexpr Window kOpenRoadWindow{30.0, 60.0};

struct Oscillation {
  double average = 0.0;
  std::vector<double> per_vehicle;
};

/// Per-vehicle RMS deviation of h_i(t) from its mean over the recorded samples
/// in [t0, t1]. Open road: followers only. Ring: all vehicles. Throws
/// ContractViolation if the window is empty, reversed or outside the record.
[[nodiscard]] Oscillation oscillation(const Trajectory& traj, Window window);

/// Smallest recorded t* with max_i |h_i(t) - h_eq| < eps for every recorded
/// t >= t*; nullopt if the final sample is already outside the band.
[[nodiscard]] std::optional<double> convergence_time(const Trajectory& traj, double h_eq,
                                                     double eps = 0.5);

struct Extremes {
  double min_headway = 0.0;
  std::optional<double> first_collision_time;
  double max_abs_accel = 0.0;
};

/// Scans every recorded sample. A collision is the first h_i <= 0; the
/// open-road leader is skipped.
[[nodiscard]] Extremes extremes(const Trajectory& traj);

/// Largest |h_i - h_eq| over recorded samples with t >= t_from.
[[nodiscard]] double max_headway_deviation(const Trajectory& traj, double h_eq, double t_from);

/// Everything above in one report. Convergence time is only filled for ring
/// runs; the window defaults per scenario (ring: whole record).
[[nodiscard]] MetricsReport summarize(const Trajectory& traj, std::optional<Window> window = std::nullopt,
                                      double eps = 0.5);

}  // namespace platoon
