#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "platoon/config.hpp"
#include "platoon/error.hpp"
#include "platoon/metrics.hpp"
#include "platoon/output.hpp"
#include "platoon/sim.hpp"
#include "platoon/stability.hpp"
#include "platoon/sweep.hpp"

#ifndef PLATOON_VERSION
#define PLATOON_VERSION "0.0.0"
#endif

namespace platoon::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> record_every;
};

struct StabilityFlags {
  std::string model;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> vprime;
  std::string ovf;
  std::optional<double> h;
  std::optional<std::size_t> n;
  bool neutral = false;
  std::vector<double> fractions{0.0, 0.2, 0.4, 0.6, 0.8};
  double vp_min = 0.0;
  double vp_max = 2.0;
  std::size_t samples = 21;
};

struct SweepFlags {
  std::string preset;
  std::optional<std::size_t> max_runs;
  std::optional<std::size_t> workers;
};

void apply_globals(RunConfig& cfg, const GlobalFlags& g) {
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.out = *g.out;
  if (g.record_every) cfg.record_every = *g.record_every;
}

std::string complex_text(Complex z) {
  std::string s = format_number(z.real());
  s += z.imag() < 0 ? " - " : " + ";
  s += format_number(std::abs(z.imag())) + "i";
  return s;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

int cmd_simulate(const GlobalFlags& g, bool svg, std::ostream& out) {
  if (g.config.empty()) throw ConfigError("simulate needs --config");
  RunConfig cfg = load_config(g.config);
  apply_globals(cfg, g);
  if (cfg.sweep) throw ConfigError("config has a sweep section; use the sweep subcommand");
  validate(cfg);

  const auto traj = run(cfg);
  const auto metrics = summarize(traj);
  const fs::path dir = cfg.out;
  write_atomic(dir / "trajectory.csv", trajectory_csv(traj));
  write_atomic(dir / "summary.json", run_summary(cfg, metrics, traj.events).dump(2) + "\n");
  if (svg) {
    write_atomic(dir / "headway.svg", svg_chart(traj, SeriesKind::Headway));
    write_atomic(dir / "velocity.svg", svg_chart(traj, SeriesKind::Velocity));
  }

  out << "scenario " << to_string(cfg.scenario) << ", model " << to_string(cfg.model) << ", a "
      << format_number(cfg.a) << ", b " << format_number(cfg.b) << ", seed " << cfg.seed << '\n';
  out << "records " << traj.records() << ", vehicles " << traj.vehicles() << '\n';
  out << "avg_oscillation " << format_number(metrics.avg_oscillation) << " m\n";
  if (traj.ring_length)
    out << "convergence_time "
        << (metrics.convergence_time ? format_number(*metrics.convergence_time) + " s" : std::string("none"))
        << '\n';
  out << "min_headway " << format_number(metrics.min_headway) << " m\n";
  out << "max_abs_accel " << format_number(metrics.max_abs_accel) << " m/s^2\n";
  out << "events " << traj.events.size() << '\n';
  for (const auto& e : traj.events)
    out << "  t=" << format_number(e.t) << " vehicle " << e.vehicle << ' ' << to_string(e.kind) << '\n';
  out << "wrote " << (dir / "trajectory.csv").string() << " and " << (dir / "summary.json").string() << '\n';
  return kOk;
}

double resolve_vprime(const StabilityFlags& f) {
  if (f.vprime && (!f.ovf.empty() || f.h)) throw ConfigError("give either --Vp or --ovf with --h, not both");
  if (f.vprime) {
    if (!std::isfinite(*f.vprime) || *f.vprime < 0.0) throw ConfigError("--Vp must be a finite value >= 0");
    return *f.vprime;
  }
  if (f.ovf.empty() || !f.h) throw ConfigError("sensitivity analysis needs --Vp or both --ovf and --h");
  std::optional<Ovf> ovf;
  if (f.ovf == "cosine") ovf.emplace(CosineOvf{});
  else if (f.ovf == "triangular") ovf.emplace(TriangularOvf{});
  else throw ConfigError("--ovf must be cosine or triangular");
  if (!ovf->interacting(*f.h)) throw ConfigError("--h lies outside the OVF's interacting range");
  return ovf->derivative(*f.h);
}

int cmd_stability(const GlobalFlags& g, const StabilityFlags& f, std::ostream& out) {
  if (f.model.empty() && !f.neutral) throw ConfigError("stability needs --model and/or --neutral");
  const fs::path dir = g.out.value_or("out");
  json report;

  if (!f.model.empty()) {
    const auto kind = parse_model_kind(f.model);
    if (!kind) throw ConfigError("unknown --model '" + f.model + "'");
    if (!f.a) throw ConfigError("--a is required with --model");
    const double b = f.b.value_or(0.0);
    if ((*kind == ModelKind::TOvm || *kind == ModelKind::FOvm) && !f.b)
      throw ConfigError("--b is required for tovm and fovm");
    const ModelSpec spec{*kind, *f.a, b, LeaderRule::OvmFollowsFirst};
    spec.validate();
    const double vp = resolve_vprime(f);

    report["model"] = std::string(to_string(*kind));
    report["a"] = *f.a;
    report["b"] = b;
    report["vprime"] = vp;
    out << "model " << to_string(*kind) << ", a " << format_number(*f.a) << ", b " << format_number(b) << ", V' "
        << format_number(vp) << '\n';

    switch (*kind) {
      case ModelKind::Ovm: {
        const auto v = ovm_criterion(*f.a, vp);
        report["threshold"] = 2.0 * vp;
        report["verdict"] = std::string(to_string(v));
        out << "criterion a > 2V': threshold " << format_number(2.0 * vp) << ", verdict " << to_string(v) << '\n';
        break;
      }
      case ModelKind::TOvm: {
        const auto v = tovm_criterion(*f.a, b, vp);
        const double lhs = *f.a > 0.0 ? (*f.a + b) * (*f.a + b) / *f.a : INFINITY;
        report["threshold"] = 2.0 * vp;
        report["criterion_value"] = std::isfinite(lhs) ? json(lhs) : json(nullptr);
        report["verdict"] = std::string(to_string(v));
        out << "criterion (a+b)^2/a > 2V': " << format_number(lhs) << " vs " << format_number(2.0 * vp)
            << ", verdict " << to_string(v) << " (large-N)\n";
        break;
      }
      case ModelKind::POvm: {
        report["verdict"] = "stable";
        out << "criterion: stable for every a > 0 and V' > 0\n";
        if (f.n) {
          const auto lam = povm_eigenvalues(*f.a, vp, *f.n);
          report["closed_form_eigenvalues"] = json::array({complex_json(lam[0]), complex_json(lam[1])});
          out << "closed-form eigenvalues " << complex_text(lam[0]) << ", " << complex_text(lam[1]) << '\n';
        }
        break;
      }
      case ModelKind::FOvm:
        out << "criterion: no closed form, see the spectral abscissa\n";
        break;
    }

    if (f.n) {
      const auto sys = build_linearized(spec, vp, *f.n);
      const auto spectral = spectral_analysis(sys);
      report["N"] = *f.n;
      report["spectral_abscissa"] = spectral.abscissa;
      report["dominant_eigenvalue"] = complex_json(spectral.dominant);
      report["max_residual"] = spectral.max_residual;
      report["linear_verdict"] = spectral.abscissa < 0.0 ? "stable" : "unstable";
      out << "N " << *f.n << ": spectral abscissa " << format_number(spectral.abscissa) << " (dominant "
          << complex_text(spectral.dominant) << "), max relative residual " << format_number(spectral.max_residual)
          << '\n';
    }
  }

  if (f.neutral) {
    if (!(f.vp_min >= 0.0 && f.vp_min < f.vp_max) || f.samples < 2)
      throw ConfigError("neutral lines need 0 <= --vp-min < --vp-max and --samples >= 2");
    std::vector<NeutralLine> lines;
    for (double fr : f.fractions) {
      if (!(fr >= 0.0 && fr <= 1.0)) throw ConfigError("--fractions values must lie in [0, 1]");
      lines.push_back(neutral_line(fr, f.vp_min, f.vp_max, f.samples));
    }
    const auto path = dir / "neutral_lines.csv";
    write_atomic(path, neutral_line_csv(lines));
    report["neutral_lines"] = path.string();
    out << "neutral lines s = 2V'(1 - f) for " << lines.size() << " fractions written to " << path.string() << '\n';
  }

  write_atomic(dir / "stability.json", report.dump(2) + "\n");
  return kOk;
}

int cmd_sweep(const GlobalFlags& g, const SweepFlags& f, std::ostream& out) {
  RunConfig cfg;
  if (!g.config.empty()) {
    cfg = load_config(g.config);
    if (!f.preset.empty()) {
      if (cfg.sweep && cfg.sweep->preset && *cfg.sweep->preset != f.preset)
        throw ConfigError("--preset conflicts with the config's sweep preset");
      if (cfg.sweep && (cfg.sweep->models || cfg.sweep->a || cfg.sweep->b || cfg.sweep->p))
        throw ConfigError("--preset cannot be combined with explicit sweep axes");
      const auto scenario = preset_scenario(f.preset);
      if (!scenario) throw ConfigError("unknown preset '" + f.preset + "'");
      if (cfg.scenario != *scenario) throw ConfigError("--preset conflicts with the config's scenario");
      if (!cfg.sweep) cfg.sweep.emplace();
      cfg.sweep->preset = f.preset;
    }
  } else {
    if (f.preset.empty()) throw ConfigError("sweep needs --config or --preset");
    const auto scenario = preset_scenario(f.preset);
    if (!scenario) throw ConfigError("unknown preset '" + f.preset + "' (expected table1 or sim1.1)");
    cfg = default_config(*scenario);
    cfg.sweep.emplace();
    cfg.sweep->preset = f.preset;
  }
  apply_globals(cfg, g);
  if (!cfg.sweep) cfg.sweep.emplace();
  if (f.max_runs) cfg.sweep->max_runs = *f.max_runs;
  if (f.workers) cfg.sweep->workers = *f.workers;

  const fs::path dir = cfg.out;
  const auto outcome = run_sweep(cfg, dir);
  out << "runs " << outcome.rows.size() << ", aggregate " << (dir / "aggregate.csv").string() << '\n';
  for (const auto& row : outcome.rows) {
    const auto& c = row.point.config;
    out << "  " << to_string(c.model) << " a=" << format_number(c.a) << " b=" << format_number(c.b);
    if (row.point.p) out << " p=" << format_number(*row.point.p);
    if (row.metrics) {
      out << " avg_oscillation=" << format_number(row.metrics->avg_oscillation);
      if (c.scenario == ScenarioKind::Ring)
        out << " convergence_time="
            << (row.metrics->convergence_time ? format_number(*row.metrics->convergence_time) : "none");
    }
    if (row.status != "ok") out << " FAILED: " << row.status;
    out << '\n';
  }
  return outcome.all_ok ? kOk : kNumeric;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Platoon car-following simulator and linear stability analysis", "platoon"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON run configuration (see docs/config-schema.md)");
  app.add_option("--seed", g.seed, "Override the PRNG seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--record-every", g.record_every, "Record every k-th step")->check(CLI::PositiveNumber);

  bool svg = false;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write trajectory.csv and summary.json");
  simulate->add_flag("--svg", svg, "Also write headway.svg and velocity.svg");

  StabilityFlags sf;
  auto* stability = app.add_subcommand("stability", "Linear stability verdicts, eigenvalues and neutral lines");
  stability->set_help_flag("--help", "Print this help message and exit");  // frees the name h for --h
  stability->add_option("--model", sf.model, "ovm, povm, tovm or fovm");
  stability->add_option("--a", sf.a, "Sensitivity to the vehicle in front (1/s)");
  stability->add_option("--b", sf.b, "Sensitivity to the leader or second vehicle ahead (1/s)");
  stability->add_option("--Vp", sf.vprime, "OVF slope V'(h) at equilibrium");
  stability->add_option("--ovf", sf.ovf, "cosine or triangular, with default parameters");
  stability->add_option("--h", sf.h, "Equilibrium headway (m), used with --ovf");
  stability->add_option("--N", sf.n, "Platoon size for the eigenvalue analysis")->check(CLI::Range(2, 100000));
  stability->add_flag("--neutral", sf.neutral, "Write neutral-line CSV for --fractions");
  stability->add_option("--fractions", sf.fractions, "Comma-separated b/(a+b) values")->delimiter(',');
  stability->add_option("--vp-min", sf.vp_min, "Lower V' bound for neutral lines");
  stability->add_option("--vp-max", sf.vp_max, "Upper V' bound for neutral lines");
  stability->add_option("--samples", sf.samples, "Points per neutral line");

  SweepFlags wf;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations and write aggregate.csv");
  sweep->add_option("--preset", wf.preset, "table1 or sim1.1");
  sweep->add_option("--max-runs", wf.max_runs, "Refuse grids larger than this");
  sweep->add_option("--workers", wf.workers, "Worker threads (0: one per hardware thread)");

  auto* version = app.add_subcommand("version", "Print the version");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, eo;
    const int code = app.exit(e, o, eo);
    out << o.str();
    err << eo.str();
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*version) {
      out << "platoon " << PLATOON_VERSION << '\n';
      return kOk;
    }
    if (*simulate) return cmd_simulate(g, svg, out);
    if (*stability) return cmd_stability(g, sf, out);
    if (*sweep) return cmd_sweep(g, wf, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ContractViolation& e) {
    err << "invalid arguments: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericAbort& e) {
    err << "numeric abort: " << e.what() << '\n';
    return kNumeric;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace platoon::cli
