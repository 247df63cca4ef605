#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace platoon {

/// Raised-cosine optimal velocity: zero below h_min, v_max above h_max and a
/// half cosine wave in between. Lengths in m, speeds in m/s.
struct CosineOvf {
  double h_min = 7.0;
  double h_max = 37.0;
  double v_max = 20.0;
  double vehicle_length = 5.0;

  friend bool operator==(const CosineOvf&, const CosineOvf&) = default;
};

/// Optimal velocity equivalent to a triangular fundamental diagram, written in
/// terms of occupancy rho(h) = vehicle_length / h.
struct TriangularOvf {
  double v_max = 30.0;
  double vehicle_length = 5.0;
  double rho_c = 5.0 / 37.0;
  double rho_max = 5.0 / 7.0;

  friend bool operator==(const TriangularOvf&, const TriangularOvf&) = default;
};

/// A validated optimal velocity function V(h). Construction throws
/// ConfigError for inconsistent parameters; evaluation never throws.
class Ovf {
 public:
  using Params = std::variant<CosineOvf, TriangularOvf>;

  explicit Ovf(CosineOvf p);
  explicit Ovf(TriangularOvf p);

  [[nodiscard]] double operator()(double h) const;
  [[nodiscard]] double derivative(double h) const;

  [[nodiscard]] double v_max() const;
  [[nodiscard]] double vehicle_length() const;

  /// Headway below which V is identically zero.
  [[nodiscard]] double jam_headway() const;
  /// Headway above which V saturates at v_max.
  [[nodiscard]] double free_headway() const;
  /// True when h lies strictly between the two flat branches.
  [[nodiscard]] bool interacting(double h) const;

  [[nodiscard]] const Params& params() const { return params_; }

 private:
  Params params_;
};

[[nodiscard]] inline double eval(const Ovf& ovf, double h) { return ovf(h); }
[[nodiscard]] inline double eval_derivative(const Ovf& ovf, double h) { return ovf.derivative(h); }

struct FdPoint {
  double density;  // veh/m
  double flow;     // veh/s
};

/// Equilibrium density-flow relation q = k V(1/k), sampled uniformly in
/// density over [0, 1/jam_headway]. The k = 0 end is the h -> inf limit.
[[nodiscard]] std::vector<FdPoint> fundamental_diagram(const Ovf& ovf, std::size_t samples);

}  // namespace platoon
