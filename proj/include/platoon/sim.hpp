#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "platoon/models.hpp"
#include "platoon/ovf.hpp"

namespace platoon {

struct SimConfig {
  double dt = 0.1;       // s
  double t_end = 300.0;  // s
  std::uint64_t seed = 42;
  std::size_t record_every = 1;  // steps between recorded samples

  void validate() const;
  /// Number of integration steps, round(t_end / dt).
  [[nodiscard]] std::size_t steps() const;
};

/// N vehicles on a ring of length L, started at equilibrium plus a uniform
/// random perturbation on [0, disturbance] of both position and speed.
struct RingScenario {
  std::size_t n = 12;
  double length = 264.0;
  Ovf ovf{CosineOvf{}};
  double disturbance = 5.0;
  ModelSpec model{};

  void validate() const;
  [[nodiscard]] double equilibrium_headway() const { return length / static_cast<double>(n); }
};

/// Leader speed v0 + A sin(2 pi t / p).
struct LeaderProfile {
  double v0 = 15.0;
  double amplitude = 5.0;
  double period = 20.0;

  void validate() const;
  [[nodiscard]] double velocity(double t) const;
  [[nodiscard]] double acceleration(double t) const;

  friend bool operator==(const LeaderProfile&, const LeaderProfile&) = default;
};

/// Open road: followers start at exact equilibrium behind a leader whose
/// speed is prescribed.
struct InfiniteScenario {
  std::size_t n = 10;
  Ovf ovf{TriangularOvf{}};
  double spacing = 22.0;
  LeaderProfile leader{};
  ModelSpec model{ModelKind::POvm, 1.2, 0.0, LeaderRule::PrescribedVelocity};

  void validate() const;
};

enum class EventKind { NegativeHeadway, LeaderOverrun };

[[nodiscard]] std::string_view to_string(EventKind kind);

struct Event {
  double t;
  std::size_t vehicle;
  EventKind kind;
};

/// Recorded samples, indexed [record][vehicle]. The leader's headway on an
/// open road is NaN.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> h;
  std::vector<std::vector<double>> accel;
  std::optional<double> ring_length;
  std::vector<Event> events;

  [[nodiscard]] std::size_t records() const { return times.size(); }
  [[nodiscard]] std::size_t vehicles() const { return x.empty() ? 0 : x.front().size(); }
};

/// One step of explicit Euler in velocity and trapezoidal rule in position:
///   v' = v + acc dt,   x' = x + (v + v') dt / 2.
/// When `leader` is given, the leader's v' is set from the profile at t + dt.
/// Throws NumericAbort if the new state is not finite.
[[nodiscard]] PlatoonState advance(const PlatoonState& s, std::span<const double> acc, double dt,
                                   const std::optional<LeaderProfile>& leader = std::nullopt);

/// advance() with accelerations evaluated from `s`.
[[nodiscard]] PlatoonState step(const PlatoonState& s, const ModelSpec& spec, const Ovf& ovf,
                                double dt,
                                const std::optional<LeaderProfile>& leader = std::nullopt);

/// Equilibrium ring layout x_i = h (i+1) + r_i, v_i = V(h) + rbar_i. Draws all
/// position perturbations first, then all speed perturbations, in vehicle order.
[[nodiscard]] PlatoonState ring_initial_state(const RingScenario& scn, std::uint64_t seed);

[[nodiscard]] Trajectory run_ring(const RingScenario& scn, const SimConfig& cfg);
[[nodiscard]] Trajectory run_infinite(const InfiniteScenario& scn, const SimConfig& cfg);

}  // namespace platoon
