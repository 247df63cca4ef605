#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "platoon/models.hpp"
#include "platoon/ovf.hpp"
#include "platoon/sim.hpp"

namespace platoon {

enum class ScenarioKind { Ring, Infinite };

[[nodiscard]] std::string_view to_string(ScenarioKind kind);

inline constexpr int kConfigVersion = 1;

/// Grid axes for a sweep. An absent axis keeps the base value; an axis given
/// as an empty list makes the grid empty.
struct SweepSpec {
  std::optional<std::string> preset;
  std::optional<std::vector<ModelKind>> models;
  std::optional<std::vector<double>> a;
  std::optional<std::vector<double>> b;
  std::optional<std::vector<double>> p;
  std::size_t max_runs = 1000;
  std::size_t workers = 0;  // 0: one per hardware thread

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// One run (or the base of a sweep). Fields that do not apply to the chosen
/// scenario keep their defaults and are neither read nor written.
struct RunConfig {
  int version = kConfigVersion;
  ScenarioKind scenario = ScenarioKind::Ring;
  ModelKind model = ModelKind::Ovm;
  double a = 1.0;
  double b = 0.0;
  std::size_t n = 12;
  double length = 264.0;   // ring only
  double spacing = 22.0;   // open road only
  Ovf::Params ovf = CosineOvf{};
  std::uint64_t seed = 42;
  double dt = 0.1;
  double t_end = 300.0;
  std::size_t record_every = 1;
  double disturbance = 5.0;  // ring only
  LeaderProfile leader{};    // open road only
  std::string out = "out";
  std::optional<SweepSpec> sweep;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Defaults for a scenario: ring N=12, L=264, cosine OVF, 300 s; open road
/// N=10, triangular OVF, v0=15, A=5, 60 s.
[[nodiscard]] RunConfig default_config(ScenarioKind scenario);

/// Scenario implied by a sweep preset name; nullopt for unknown names.
[[nodiscard]] std::optional<ScenarioKind> preset_scenario(std::string_view preset);

/// Schema-checked parse. Unknown or misplaced keys, wrong types and invalid
/// values throw ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig parse_config_text(std::string_view text);

/// Throws IoError if the file cannot be read, ConfigError otherwise.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Canonical echo; parse_config(to_json(c)) == c.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

[[nodiscard]] RingScenario ring_scenario(const RunConfig& cfg);
[[nodiscard]] InfiniteScenario infinite_scenario(const RunConfig& cfg);
[[nodiscard]] SimConfig sim_config(const RunConfig& cfg);

/// Builds the scenario objects and runs their validation.
void validate(const RunConfig& cfg);

}  // namespace platoon
