#include "platoon/models.hpp"

#include <cmath>
#include <string>

#include "platoon/error.hpp"

namespace platoon {

void ModelSpec::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0)
    throw ConfigError("sensitivities a, b must be finite and nonnegative");
  if (a + b <= 0.0) throw ConfigError("a + b must be positive");
  if ((kind == ModelKind::Ovm || kind == ModelKind::POvm) && b != 0.0)
    throw ConfigError(std::string(to_string(kind)) + " takes no b sensitivity");
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ovm: return "ovm";
    case ModelKind::POvm: return "povm";
    case ModelKind::TOvm: return "tovm";
    case ModelKind::FOvm: return "fovm";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "ovm") return ModelKind::Ovm;
  if (name == "povm") return ModelKind::POvm;
  if (name == "tovm") return ModelKind::TOvm;
  if (name == "fovm") return ModelKind::FOvm;
  return std::nullopt;
}

double headway(const PlatoonState& s, std::size_t i) {
  const std::size_t n = s.size();
  if (i >= n) throw ContractViolation("headway: vehicle index out of range");
  if (i + 1 < n) return s.x[i + 1] - s.x[i];
  if (!s.is_ring()) throw ContractViolation("headway: the leader has no predecessor on an open road");
  return s.x[0] + *s.ring_length - s.x[i];
}

double leader_spacing(const PlatoonState& s, std::size_t i) {
  const std::size_t n = s.size();
  if (i + 1 >= n) throw ContractViolation("leader_spacing: only defined for followers");
  return (s.x[n - 1] - s.x[i]) / static_cast<double>(n - 1 - i);
}

double accel_ovm(const PlatoonState& s, std::size_t i, double a, const Ovf& ovf) {
  return a * (ovf(headway(s, i)) - s.v[i]);
}

double accel_povm(const PlatoonState& s, std::size_t i, double a, const Ovf& ovf) {
  return a * (ovf(leader_spacing(s, i)) - s.v[i]);
}

double accel_tovm(const PlatoonState& s, std::size_t i, double a, double b, const Ovf& ovf) {
  if (i + 1 >= s.size()) throw ContractViolation("accel_tovm: only defined for followers");
  return accel_ovm(s, i, a, ovf) + accel_povm(s, i, b, ovf);
}

double accel_fovm(const PlatoonState& s, std::size_t i, double a, double b, const Ovf& ovf) {
  const std::size_t n = s.size();
  if (i >= n) throw ContractViolation("accel_fovm: vehicle index out of range");
  const std::size_t j = i + 2;
  double x2 = 0.0;
  if (j < n) {
    x2 = s.x[j];
  } else {
    if (!s.is_ring()) throw ContractViolation("accel_fovm: second vehicle ahead undefined on an open road");
    x2 = s.x[j - n] + *s.ring_length;
  }
  return accel_ovm(s, i, a, ovf) + b * (ovf(0.5 * (x2 - s.x[i])) - s.v[i]);
}

double accel_leader(const PlatoonState& s, const ModelSpec& spec, const Ovf& ovf) {
  if (spec.leader_rule != LeaderRule::OvmFollowsFirst)
    throw ContractViolation("accel_leader: prescribed leaders have no acceleration law");
  if (!s.is_ring()) throw ContractViolation("accel_leader: leader-follows-first needs a ring road");
  const std::size_t n = s.leader();
  switch (spec.kind) {
    case ModelKind::Ovm:
    case ModelKind::POvm: return accel_ovm(s, n, spec.a, ovf);
    case ModelKind::TOvm: return accel_ovm(s, n, spec.a + spec.b, ovf);
    case ModelKind::FOvm: return accel_fovm(s, n, spec.a, spec.b, ovf);
  }
  return 0.0;
}

double accel_follower(const PlatoonState& s, std::size_t i, const ModelSpec& spec, const Ovf& ovf) {
  switch (spec.kind) {
    case ModelKind::Ovm: return accel_ovm(s, i, spec.a, ovf);
    case ModelKind::POvm: return accel_povm(s, i, spec.a, ovf);
    case ModelKind::TOvm: return accel_tovm(s, i, spec.a, spec.b, ovf);
    case ModelKind::FOvm: return accel_fovm(s, i, spec.a, spec.b, ovf);
  }
  return 0.0;
}

std::vector<double> accelerations(const PlatoonState& s, const ModelSpec& spec, const Ovf& ovf) {
  const std::size_t n = s.size();
  if (n < 2 || s.v.size() != n) throw ContractViolation("platoon needs N >= 2 and matching x, v");
  std::vector<double> acc(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) acc[i] = accel_follower(s, i, spec, ovf);
  if (spec.leader_rule == LeaderRule::OvmFollowsFirst) acc[n - 1] = accel_leader(s, spec, ovf);
  return acc;
}

}  // namespace platoon
