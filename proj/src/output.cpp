#include "platoon/output.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "platoon/error.hpp"

namespace platoon {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,vehicle,x,v,h\n";
  out.reserve(out.size() + traj.records() * traj.vehicles() * 48);
  for (std::size_t r = 0; r < traj.records(); ++r) {
    const std::string t = format_number(traj.times[r]);
    for (std::size_t i = 0; i < traj.vehicles(); ++i) {
      out += t;
      out += ',';
      out += std::to_string(i + 1);
      out += ',';
      out += format_number(traj.x[r][i]);
      out += ',';
      out += format_number(traj.v[r][i]);
      out += ',';
      out += format_number(traj.h[r][i]);
      out += '\n';
    }
  }
  return out;
}

std::string neutral_line_csv(std::span<const NeutralLine> lines) {
  std::string out = "vprime,fraction,s_threshold\n";
  for (const auto& line : lines)
    for (const auto& [vp, s] : line.points)
      out += format_number(vp) + ',' + format_number(line.fraction) + ',' + format_number(s) + '\n';
  return out;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// JSON has no NaN/inf; those become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const MetricsReport& m) {
  json per = json::array();
  for (double v : m.per_vehicle_oscillation) per.push_back(finite_or_null(v));
  return {{"avg_oscillation", finite_or_null(m.avg_oscillation)},
          {"per_vehicle_oscillation", per},
          {"convergence_time", optional_number(m.convergence_time)},
          {"min_headway", finite_or_null(m.min_headway)},
          {"first_collision_time", optional_number(m.first_collision_time)},
          {"max_abs_accel", finite_or_null(m.max_abs_accel)}};
}

json to_json(std::span<const Event> events) {
  json out = json::array();
  for (const auto& e : events)
    out.push_back({{"t", e.t}, {"vehicle", e.vehicle}, {"kind", std::string(to_string(e.kind))}});
  return out;
}

json run_summary(const RunConfig& cfg, const MetricsReport& m, std::span<const Event> events) {
  return {{"seed", cfg.seed}, {"metrics", to_json(m)}, {"events", to_json(events)}, {"config", to_json(cfg)}};
}

std::string svg_chart(const Trajectory& traj, SeriesKind kind) {
  constexpr double width = 800.0;
  constexpr double height = 400.0;
  constexpr double margin = 40.0;
  const auto& series = kind == SeriesKind::Headway ? traj.h : traj.v;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : series)
    for (double y : row)
      if (std::isfinite(y)) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
  if (!(lo < hi)) {
    lo = std::isfinite(lo) ? lo - 1.0 : 0.0;
    hi = lo + 2.0;
  }
  const double t0 = traj.records() ? traj.times.front() : 0.0;
  const double t1 = traj.records() > 1 ? traj.times.back() : t0 + 1.0;
  auto px = [&](double t) { return margin + (t - t0) / (t1 - t0) * (width - 2 * margin); };
  auto py = [&](double y) { return height - margin - (y - lo) / (hi - lo) * (height - 2 * margin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin << "\" height=\""
      << height - 2 * margin << "\" fill=\"none\" stroke=\"#888\"/>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << margin - 8 << "\" font-size=\"12\">"
      << (kind == SeriesKind::Headway ? "headway [m]" : "velocity [m/s]") << " from " << format_number(lo)
      << " to " << format_number(hi) << ", t from " << format_number(t0) << " to " << format_number(t1)
      << " s</text>\n";
  for (std::size_t i = 0; i < traj.vehicles(); ++i) {
    const double hue = 360.0 * static_cast<double>(i) / static_cast<double>(traj.vehicles());
    svg << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"hsl(" << format_number(hue) << ",70%,40%)\" points=\"";
    bool first = true;
    for (std::size_t r = 0; r < traj.records(); ++r) {
      const double y = series[r][i];
      if (!std::isfinite(y)) continue;
      if (!first) svg << ' ';
      first = false;
      svg << format_number(px(traj.times[r])) << ',' << format_number(py(y));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ostringstream suffix;
  suffix << ".tmp." << ::getpid() << '.' << std::this_thread::get_id() << '.' << counter++;
  auto tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

}  // namespace platoon
