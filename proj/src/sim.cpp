#include "platoon/sim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "platoon/error.hpp"
#include "platoon/rng.hpp"

namespace platoon {

void SimConfig::validate() const {
  if (!std::isfinite(dt) || dt <= 0.0) throw ConfigError("dt must be positive");
  if (!std::isfinite(t_end) || t_end < dt) throw ConfigError("t_end must be at least dt");
  if (record_every == 0) throw ConfigError("record_every must be at least 1");
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

void RingScenario::validate() const {
  if (n < 2) throw ConfigError("ring needs at least 2 vehicles");
  if (!std::isfinite(length) || length <= 0.0) throw ConfigError("ring length must be positive");
  model.validate();
  if (model.leader_rule != LeaderRule::OvmFollowsFirst)
    throw ConfigError("ring scenarios use the leader-follows-first rule");
  const double h = equilibrium_headway();
  if (!ovf.interacting(h))
    throw ConfigError("equilibrium headway L/N lies outside the OVF's interacting range");
  if (!std::isfinite(disturbance) || disturbance < 0.0)
    throw ConfigError("disturbance must be nonnegative");
  if (disturbance >= h) throw ConfigError("disturbance must be smaller than L/N so vehicle order is kept");
}

void LeaderProfile::validate() const {
  if (!std::isfinite(v0) || !std::isfinite(amplitude) || amplitude < 0.0 || v0 < amplitude)
    throw ConfigError("leader profile requires v0 >= A >= 0");
  if (!std::isfinite(period) || period <= 0.0) throw ConfigError("leader period must be positive");
}

double LeaderProfile::velocity(double t) const {
  return v0 + amplitude * std::sin(2.0 * std::numbers::pi * t / period);
}

double LeaderProfile::acceleration(double t) const {
  const double w = 2.0 * std::numbers::pi / period;
  return amplitude * w * std::cos(w * t);
}

void InfiniteScenario::validate() const {
  if (n < 2) throw ConfigError("platoon needs at least 2 vehicles");
  if (!std::isfinite(spacing) || spacing <= 0.0) throw ConfigError("spacing must be positive");
  leader.validate();
  model.validate();
  if (model.kind != ModelKind::Ovm && model.kind != ModelKind::POvm)
    throw ConfigError("unsupported scenario: the open-road run supports ovm and povm only");
  if (model.leader_rule != LeaderRule::PrescribedVelocity)
    throw ConfigError("open-road scenarios need a prescribed-velocity leader");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NegativeHeadway: return "NEGATIVE_HEADWAY";
    case EventKind::LeaderOverrun: return "LEADER_OVERRUN";
  }
  return "?";
}

PlatoonState advance(const PlatoonState& s, std::span<const double> acc, double dt,
                     const std::optional<LeaderProfile>& leader) {
  const std::size_t n = s.size();
  if (acc.size() != n) throw ContractViolation("advance: acceleration vector has wrong size");
  PlatoonState next = s;
  next.t = s.t + dt;
  for (std::size_t i = 0; i < n; ++i) next.v[i] = s.v[i] + acc[i] * dt;
  if (leader) next.v[n - 1] = leader->velocity(next.t);
  for (std::size_t i = 0; i < n; ++i) {
    next.x[i] = s.x[i] + 0.5 * (s.v[i] + next.v[i]) * dt;
    if (!std::isfinite(next.x[i]) || !std::isfinite(next.v[i])) {
      std::ostringstream msg;
      msg << "non-finite state at t=" << next.t << " for vehicle " << (i + 1) << " (x=" << next.x[i]
          << ", v=" << next.v[i] << ")";
      throw NumericAbort(msg.str());
    }
  }
  return next;
}

PlatoonState step(const PlatoonState& s, const ModelSpec& spec, const Ovf& ovf, double dt,
                  const std::optional<LeaderProfile>& leader) {
  const auto acc = accelerations(s, spec, ovf);
  return advance(s, acc, dt, leader);
}

PlatoonState ring_initial_state(const RingScenario& scn, std::uint64_t seed) {
  const double h = scn.equilibrium_headway();
  SplitMix64 rng(seed);
  PlatoonState s;
  s.ring_length = scn.length;
  s.x.resize(scn.n);
  s.v.resize(scn.n);
  for (std::size_t i = 0; i < scn.n; ++i)
    s.x[i] = h * static_cast<double>(i + 1) + scn.disturbance * rng.uniform();
  const double v_eq = scn.ovf(h);
  for (std::size_t i = 0; i < scn.n; ++i) s.v[i] = v_eq + scn.disturbance * rng.uniform();
  return s;
}

namespace {

class EventLog {
 public:
  EventLog(std::size_t n, bool track_leader_spacing)
      : seen_negative_(n, false), seen_overrun_(n, false), track_overrun_(track_leader_spacing) {}

  void scan(const PlatoonState& s, std::vector<Event>& out) {
    const std::size_t n = s.size();
    const std::size_t last = s.is_ring() ? n : n - 1;
    for (std::size_t i = 0; i < last; ++i) {
      if (!seen_negative_[i] && headway(s, i) <= 0.0) {
        seen_negative_[i] = true;
        out.push_back({s.t, i + 1, EventKind::NegativeHeadway});
      }
    }
    if (!track_overrun_) return;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!seen_overrun_[i] && s.x[n - 1] - s.x[i] <= 0.0) {
        seen_overrun_[i] = true;
        out.push_back({s.t, i + 1, EventKind::LeaderOverrun});
      }
    }
  }

 private:
  std::vector<bool> seen_negative_;
  std::vector<bool> seen_overrun_;
  bool track_overrun_;
};

void record(Trajectory& traj, const PlatoonState& s, const std::vector<double>& acc) {
  const std::size_t n = s.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i)
    h[i] = (i + 1 < n || s.is_ring()) ? headway(s, i) : std::numeric_limits<double>::quiet_NaN();
  traj.times.push_back(s.t);
  traj.x.push_back(s.x);
  traj.v.push_back(s.v);
  traj.h.push_back(std::move(h));
  traj.accel.push_back(acc);
}

Trajectory integrate(PlatoonState s, const ModelSpec& spec, const Ovf& ovf, const SimConfig& cfg,
                     const std::optional<LeaderProfile>& leader) {
  const std::size_t steps = cfg.steps();
  const bool leader_coupled = spec.kind == ModelKind::POvm || spec.kind == ModelKind::TOvm;
  Trajectory traj;
  traj.ring_length = s.ring_length;
  EventLog log(s.size(), leader_coupled);

  for (std::size_t j = 0;; ++j) {
    s.t = static_cast<double>(j) * cfg.dt;
    log.scan(s, traj.events);
    auto acc = accelerations(s, spec, ovf);
    if (leader) acc[s.leader()] = leader->acceleration(s.t);
    if (j % cfg.record_every == 0 || j == steps) record(traj, s, acc);
    if (j == steps) break;
    s = advance(s, acc, cfg.dt, leader);
  }
  return traj;
}

}  // namespace

Trajectory run_ring(const RingScenario& scn, const SimConfig& cfg) {
  scn.validate();
  cfg.validate();
  return integrate(ring_initial_state(scn, cfg.seed), scn.model, scn.ovf, cfg, std::nullopt);
}

Trajectory run_infinite(const InfiniteScenario& scn, const SimConfig& cfg) {
  scn.validate();
  cfg.validate();
  PlatoonState s;
  s.x.resize(scn.n);
  s.v.assign(scn.n, scn.leader.v0);
  for (std::size_t i = 0; i < scn.n; ++i) s.x[i] = scn.spacing * static_cast<double>(i + 1);
  return integrate(std::move(s), scn.model, scn.ovf, cfg, scn.leader);
}

}  // namespace platoon
