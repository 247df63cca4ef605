#include "platoon/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects any key it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail("expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

  const json* find(const std::string& key) {
    known_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail("'" + key + "' must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail("'" + key + "' must be finite");
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0))
        fail("'" + key + "' must be a nonnegative integer");
      const auto raw = v->get<std::uint64_t>();
      if (raw > std::numeric_limits<Int>::max()) fail("'" + key + "' is out of range");
      out = static_cast<Int>(raw);
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail("'" + key + "' must be a string");
      out = v->get<std::string>();
    }
  }

  std::optional<std::vector<double>> number_list(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail("'" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail("'" + key + "' must hold finite numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  /// Call after all reads; rejects leftovers.
  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      (void)value;
      if (!known_.count(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(where_ + ": " + msg);
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> known_;
};

ModelKind model_from(const std::string& name, const ObjectReader& r) {
  const auto kind = parse_model_kind(name);
  if (!kind) r.fail("unknown model '" + name + "' (expected ovm, povm, tovm or fovm)");
  return *kind;
}

Ovf::Params parse_ovf(const json& node, const Ovf::Params& fallback) {
  ObjectReader r(node, "ovf");
  std::string kind;
  r.string("kind", kind);
  if (kind.empty()) r.fail("'kind' is required (cosine or triangular)");
  Ovf::Params out;
  if (kind == "cosine") {
    CosineOvf p = std::holds_alternative<CosineOvf>(fallback) ? std::get<CosineOvf>(fallback) : CosineOvf{};
    r.number("h_min", p.h_min);
    r.number("h_max", p.h_max);
    r.number("v_max", p.v_max);
    r.number("vehicle_length", p.vehicle_length);
    out = p;
  } else if (kind == "triangular") {
    TriangularOvf p =
        std::holds_alternative<TriangularOvf>(fallback) ? std::get<TriangularOvf>(fallback) : TriangularOvf{};
    r.number("v_max", p.v_max);
    r.number("vehicle_length", p.vehicle_length);
    r.number("rho_c", p.rho_c);
    r.number("rho_max", p.rho_max);
    out = p;
  } else {
    r.fail("unknown kind '" + kind + "' (expected cosine or triangular)");
  }
  r.finish();
  return out;
}

SweepSpec parse_sweep(const json& node) {
  ObjectReader r(node, "sweep");
  SweepSpec s;
  if (const json* v = r.find("preset")) {
    if (!v->is_string()) r.fail("'preset' must be a string");
    s.preset = v->get<std::string>();
    if (!preset_scenario(*s.preset)) r.fail("unknown preset '" + *s.preset + "' (expected table1 or sim1.1)");
  }
  if (const json* v = r.find("model")) {
    if (!v->is_array()) r.fail("'model' must be a list of model names");
    s.models.emplace();
    for (const auto& e : *v) {
      if (!e.is_string()) r.fail("'model' must hold strings");
      s.models->push_back(model_from(e.get<std::string>(), r));
    }
  }
  s.a = r.number_list("a");
  s.b = r.number_list("b");
  s.p = r.number_list("p");
  r.integer("max_runs", s.max_runs);
  r.integer("workers", s.workers);
  r.finish();
  if (s.preset && (s.models || s.a || s.b || s.p))
    throw ConfigError("sweep: a preset fixes its own axes; remove model/a/b/p");
  return s;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) { return kind == ScenarioKind::Ring ? "ring" : "infinite"; }

RunConfig default_config(ScenarioKind scenario) {
  RunConfig c;
  c.scenario = scenario;
  if (scenario == ScenarioKind::Infinite) {
    c.model = ModelKind::POvm;
    c.a = 1.2;
    c.n = 10;
    c.ovf = TriangularOvf{};
    c.t_end = 60.0;
  }
  return c;
}

std::optional<ScenarioKind> preset_scenario(std::string_view preset) {
  if (preset == "table1") return ScenarioKind::Infinite;
  if (preset == "sim1.1") return ScenarioKind::Ring;
  return std::nullopt;
}

RunConfig parse_config(const json& doc) {
  ObjectReader r(doc, "config");

  int version = kConfigVersion;
  r.integer("version", version);
  if (version != kConfigVersion) r.fail("unsupported version " + std::to_string(version));

  std::optional<SweepSpec> sweep;
  if (const json* v = r.find("sweep")) sweep = parse_sweep(*v);
  const std::optional<ScenarioKind> implied = sweep && sweep->preset ? preset_scenario(*sweep->preset) : std::nullopt;

  std::optional<ScenarioKind> scenario;
  if (const json* v = r.find("scenario")) {
    if (!v->is_string()) r.fail("'scenario' must be a string");
    const auto name = v->get<std::string>();
    if (name == "ring") scenario = ScenarioKind::Ring;
    else if (name == "infinite") scenario = ScenarioKind::Infinite;
    else r.fail("unknown scenario '" + name + "' (expected ring or infinite)");
  }
  if (scenario && implied && *scenario != *implied) r.fail("scenario conflicts with the sweep preset");
  if (!scenario) scenario = implied;
  if (!scenario) r.fail("'scenario' is required");

  RunConfig c = default_config(*scenario);
  c.version = version;
  c.sweep = std::move(sweep);

  // Model and sensitivity have no scenario default unless a sweep supplies them.
  const bool preset = c.sweep && c.sweep->preset;
  if (const json* v = r.find("model")) {
    if (!v->is_string()) r.fail("'model' must be a string");
    c.model = model_from(v->get<std::string>(), r);
  } else if (!preset && !(c.sweep && c.sweep->models)) {
    r.fail("'model' is required");
  }
  if (!r.has("a") && !preset && !(c.sweep && c.sweep->a)) r.fail("'a' is required");
  r.number("a", c.a);
  r.number("b", c.b);
  r.integer("N", c.n);
  r.integer("seed", c.seed);
  r.number("dt", c.dt);
  r.number("t_end", c.t_end);
  r.integer("record_every", c.record_every);
  r.string("out", c.out);
  if (const json* v = r.find("ovf")) c.ovf = parse_ovf(*v, c.ovf);

  if (c.scenario == ScenarioKind::Ring) {
    r.number("L", c.length);
    r.number("disturbance", c.disturbance);
    if (r.has("leader") || r.has("spacing")) r.fail("'leader' and 'spacing' apply to the infinite scenario only");
  } else {
    r.number("spacing", c.spacing);
    if (const json* v = r.find("leader")) {
      ObjectReader lr(*v, "leader");
      lr.number("v0", c.leader.v0);
      lr.number("A", c.leader.amplitude);
      lr.number("p", c.leader.period);
      lr.finish();
    }
    if (r.has("L") || r.has("disturbance")) r.fail("'L' and 'disturbance' apply to the ring scenario only");
  }
  r.finish();
  return c;
}

RunConfig parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading config file '" + path.string() + "'");
  return parse_config_text(buf.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["version"] = c.version;
  j["scenario"] = std::string(to_string(c.scenario));
  j["model"] = std::string(to_string(c.model));
  j["a"] = c.a;
  j["b"] = c.b;
  j["N"] = c.n;
  if (std::holds_alternative<CosineOvf>(c.ovf)) {
    const auto& p = std::get<CosineOvf>(c.ovf);
    j["ovf"] = {{"kind", "cosine"}, {"h_min", p.h_min}, {"h_max", p.h_max}, {"v_max", p.v_max},
                {"vehicle_length", p.vehicle_length}};
  } else {
    const auto& p = std::get<TriangularOvf>(c.ovf);
    j["ovf"] = {{"kind", "triangular"}, {"v_max", p.v_max}, {"vehicle_length", p.vehicle_length},
                {"rho_c", p.rho_c}, {"rho_max", p.rho_max}};
  }
  j["seed"] = c.seed;
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["record_every"] = c.record_every;
  if (c.scenario == ScenarioKind::Ring) {
    j["L"] = c.length;
    j["disturbance"] = c.disturbance;
  } else {
    j["spacing"] = c.spacing;
    j["leader"] = {{"v0", c.leader.v0}, {"A", c.leader.amplitude}, {"p", c.leader.period}};
  }
  j["out"] = c.out;
  if (c.sweep) {
    json s;
    const auto& sw = *c.sweep;
    if (sw.preset) s["preset"] = *sw.preset;
    if (sw.models) {
      s["model"] = json::array();
      for (auto m : *sw.models) s["model"].push_back(std::string(to_string(m)));
    }
    if (sw.a) s["a"] = *sw.a;
    if (sw.b) s["b"] = *sw.b;
    if (sw.p) s["p"] = *sw.p;
    s["max_runs"] = sw.max_runs;
    s["workers"] = sw.workers;
    j["sweep"] = std::move(s);
  }
  return j;
}

RingScenario ring_scenario(const RunConfig& c) {
  if (c.scenario != ScenarioKind::Ring) throw ContractViolation("ring_scenario: config is not a ring run");
  RingScenario s;
  s.n = c.n;
  s.length = c.length;
  s.ovf = std::visit([](const auto& p) { return Ovf(p); }, c.ovf);
  s.disturbance = c.disturbance;
  s.model = ModelSpec{c.model, c.a, c.b, LeaderRule::OvmFollowsFirst};
  return s;
}

InfiniteScenario infinite_scenario(const RunConfig& c) {
  if (c.scenario != ScenarioKind::Infinite)
    throw ContractViolation("infinite_scenario: config is not an open-road run");
  InfiniteScenario s;
  s.n = c.n;
  s.ovf = std::visit([](const auto& p) { return Ovf(p); }, c.ovf);
  s.spacing = c.spacing;
  s.leader = c.leader;
  s.model = ModelSpec{c.model, c.a, c.b, LeaderRule::PrescribedVelocity};
  return s;
}

SimConfig sim_config(const RunConfig& c) {
  SimConfig s;
  s.dt = c.dt;
  s.t_end = c.t_end;
  s.seed = c.seed;
  s.record_every = c.record_every;
  return s;
}

void validate(const RunConfig& c) {
  sim_config(c).validate();
  if (c.scenario == ScenarioKind::Ring) ring_scenario(c).validate();
  else infinite_scenario(c).validate();
}

}  // namespace platoon
