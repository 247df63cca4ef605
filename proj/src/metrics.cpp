#include "platoon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "platoon/error.hpp"

namespace platoon {
namespace {

// Vehicles with a defined headway.
std::size_t headway_count(const Trajectory& traj) {
  const std::size_t n = traj.vehicles();
  return traj.ring_length ? n : (n == 0 ? 0 : n - 1);
}

// Sample times are j * dt products; allow for their rounding at the edges.
constexpr double kTimeSlack = 1e-9;

}  // namespace

Oscillation oscillation(const Trajectory& traj, Window w) {
  if (traj.records() == 0) throw ContractViolation("oscillation: empty trajectory");
  if (!(w.t0 < w.t1)) throw ContractViolation("oscillation: window must satisfy t0 < t1");
  if (w.t0 < traj.times.front() - kTimeSlack || w.t1 > traj.times.back() + kTimeSlack)
    throw ContractViolation("oscillation: window lies outside the recorded range");

  const std::size_t m = headway_count(traj);
  std::vector<double> sum(m, 0.0);
  std::size_t count = 0;
  auto in_window = [&](double t) { return t >= w.t0 - kTimeSlack && t <= w.t1 + kTimeSlack; };
  for (std::size_t r = 0; r < traj.records(); ++r) {
    if (!in_window(traj.times[r])) continue;
    ++count;
    for (std::size_t i = 0; i < m; ++i) sum[i] += traj.h[r][i];
  }
  if (count == 0) throw ContractViolation("oscillation: no recorded samples in window");

  Oscillation out;
  out.per_vehicle.assign(m, 0.0);
  for (std::size_t r = 0; r < traj.records(); ++r) {
    if (!in_window(traj.times[r])) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = traj.h[r][i] - sum[i] / static_cast<double>(count);
      out.per_vehicle[i] += d * d;
    }
  }
  double total = 0.0;
  for (auto& v : out.per_vehicle) {
    v = std::sqrt(v / static_cast<double>(count));
    total += v;
  }
  out.average = m == 0 ? 0.0 : total / static_cast<double>(m);
  return out;
}

std::optional<double> convergence_time(const Trajectory& traj, double h_eq, double eps) {
  const std::size_t m = headway_count(traj);
  std::optional<double> t_star;
  for (std::size_t r = traj.records(); r-- > 0;) {
    double dev = 0.0;
    for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(traj.h[r][i] - h_eq));
    if (!(dev < eps)) break;
    t_star = traj.times[r];
  }
  return t_star;
}

Extremes extremes(const Trajectory& traj) {
  const std::size_t m = headway_count(traj);
  Extremes e;
  e.min_headway = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < traj.records(); ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      const double h = traj.h[r][i];
      e.min_headway = std::min(e.min_headway, h);
      if (!e.first_collision_time && h <= 0.0) e.first_collision_time = traj.times[r];
    }
    for (double a : traj.accel[r]) e.max_abs_accel = std::max(e.max_abs_accel, std::abs(a));
  }
  return e;
}

double max_headway_deviation(const Trajectory& traj, double h_eq, double t_from) {
  const std::size_t m = headway_count(traj);
  double dev = 0.0;
  for (std::size_t r = 0; r < traj.records(); ++r) {
    if (traj.times[r] < t_from - kTimeSlack) continue;
    for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(traj.h[r][i] - h_eq));
  }
  return dev;
}

MetricsReport summarize(const Trajectory& traj, std::optional<Window> window, double eps) {
  if (traj.records() == 0) throw ContractViolation("summarize: empty trajectory");
  MetricsReport rep;
  Window w{traj.times.front(), traj.times.back()};
  if (window) {
    w = *window;
  } else if (!traj.ring_length && traj.times.front() <= kOpenRoadWindow.t0 &&
             traj.times.back() + kTimeSlack >= kOpenRoadWindow.t1) {
    w = kOpenRoadWindow;
  }
  if (w.t0 < w.t1) {
    auto osc = oscillation(traj, w);
    rep.avg_oscillation = osc.average;
    rep.per_vehicle_oscillation = std::move(osc.per_vehicle);
  } else {
    rep.per_vehicle_oscillation.assign(headway_count(traj), 0.0);
  }
  if (traj.ring_length) {
    const double h_eq = *traj.ring_length / static_cast<double>(traj.vehicles());
    rep.convergence_time = convergence_time(traj, h_eq, eps);
  }
  const auto ex = extremes(traj);
  rep.min_headway = ex.min_headway;
  rep.first_collision_time = ex.first_collision_time;
  rep.max_abs_accel = ex.max_abs_accel;
  return rep;
}

}  // namespace platoon
