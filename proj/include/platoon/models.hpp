#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "platoon/ovf.hpp"

namespace platoon {

/// Car-following law applied to the followers.
///  - Ovm:  a (V(h_i) - v_i)
///  - POvm: a (V((x_N - x_i)/(N - i)) - v_i), i.e. target speed from the
///          average spacing to the platoon leader
///  - TOvm: Ovm with sensitivity a plus POvm with sensitivity b
///  - FOvm: a (V(h_i) - v_i) + b (V((x_{i+2} - x_i)/2) - v_i)
enum class ModelKind { Ovm, POvm, TOvm, FOvm };

/// How the platoon leader (vehicle N) moves.
enum class LeaderRule {
  OvmFollowsFirst,     // ring road: the leader follows vehicle 1 across the seam
  PrescribedVelocity,  // leader speed is imposed by the scenario
};

struct ModelSpec {
  ModelKind kind = ModelKind::Ovm;
  double a = 1.0;  // sensitivity to the vehicle in front (1/s)
  double b = 0.0;  // sensitivity to the leader / second vehicle ahead (1/s)
  LeaderRule leader_rule = LeaderRule::OvmFollowsFirst;

  /// Throws ConfigError when a, b are negative, both zero, or b != 0 for Ovm/POvm.
  void validate() const;
};

[[nodiscard]] std::string_view to_string(ModelKind kind);
[[nodiscard]] std::optional<ModelKind> parse_model_kind(std::string_view name);

/// Platoon snapshot. Vehicles are indexed 0..N-1 from the rear; index N-1 is
/// the leader. Positions are cumulative and never wrapped, so on a ring the
/// seam headway is x[0] + L - x[N-1].
struct PlatoonState {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> v;
  std::optional<double> ring_length;

  [[nodiscard]] std::size_t size() const { return x.size(); }
  [[nodiscard]] std::size_t leader() const { return x.size() - 1; }
  [[nodiscard]] bool is_ring() const { return ring_length.has_value(); }
};

/// Distance to the vehicle ahead. Negative values are returned as-is.
/// Throws ContractViolation for the leader on an open road.
[[nodiscard]] double headway(const PlatoonState& s, std::size_t i);

/// Average spacing between follower i and the leader, (x_N - x_i)/(N - i).
[[nodiscard]] double leader_spacing(const PlatoonState& s, std::size_t i);

[[nodiscard]] double accel_ovm(const PlatoonState& s, std::size_t i, double a, const Ovf& ovf);
[[nodiscard]] double accel_povm(const PlatoonState& s, std::size_t i, double a, const Ovf& ovf);
[[nodiscard]] double accel_tovm(const PlatoonState& s, std::size_t i, double a, double b,
                                const Ovf& ovf);
[[nodiscard]] double accel_fovm(const PlatoonState& s, std::size_t i, double a, double b,
                                const Ovf& ovf);

/// Leader law on a ring: OVM against the seam headway with sensitivity a
/// (a + b for TOvm); FOvm keeps the same law as everyone else. Throws
/// ContractViolation for PrescribedVelocity or an open road.
[[nodiscard]] double accel_leader(const PlatoonState& s, const ModelSpec& spec, const Ovf& ovf);

/// Follower law for vehicle i < N-1 under spec.kind.
[[nodiscard]] double accel_follower(const PlatoonState& s, std::size_t i, const ModelSpec& spec,
                                    const Ovf& ovf);

/// Accelerations of the whole platoon. With a prescribed leader the leader
/// entry is 0; the integrator sets its velocity directly.
[[nodiscard]] std::vector<double> accelerations(const PlatoonState& s, const ModelSpec& spec,
                                                const Ovf& ovf);

}  // namespace platoon
