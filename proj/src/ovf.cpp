#include "platoon/ovf.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "platoon/error.hpp"

namespace platoon {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

double cosine_value(const CosineOvf& p, double h) {
  if (!(h > p.h_min)) return 0.0;  // also catches NaN
  if (h >= p.h_max) return p.v_max;
  const double phase = std::numbers::pi * (h - p.h_min) / (p.h_max - p.h_min);
  return 0.5 * p.v_max * (1.0 - std::cos(phase));
}

double cosine_slope(const CosineOvf& p, double h) {
  if (h < p.h_min || h > p.h_max) return 0.0;
  const double span = p.h_max - p.h_min;
  const double phase = std::numbers::pi * (h - p.h_min) / span;
  return 0.5 * p.v_max * (std::numbers::pi / span) * std::sin(phase);
}

double triangular_value(const TriangularOvf& p, double h) {
  if (!(h > 0.0)) return 0.0;
  const double rho = p.vehicle_length / h;
  if (rho <= p.rho_c) return p.v_max;
  if (rho >= p.rho_max) return 0.0;
  return p.v_max * p.rho_c * (rho - p.rho_max) / (rho * (p.rho_c - p.rho_max));
}

// dV/dh on the congested branch; V is affine in h there.
double triangular_congested_slope(const TriangularOvf& p) {
  return p.v_max * p.rho_c * p.rho_max / (p.vehicle_length * (p.rho_max - p.rho_c));
}

}  // namespace

Ovf::Ovf(CosineOvf p) : params_(p) {
  if (!positive(p.h_min) || !positive(p.h_max) || !(p.h_min < p.h_max))
    throw ConfigError("cosine OVF requires 0 < h_min < h_max");
  if (!positive(p.v_max)) throw ConfigError("cosine OVF requires v_max > 0");
  if (!positive(p.vehicle_length)) throw ConfigError("cosine OVF requires vehicle_length > 0");
}

Ovf::Ovf(TriangularOvf p) : params_(p) {
  if (!positive(p.rho_c) || !positive(p.rho_max) || !(p.rho_c < p.rho_max) || p.rho_max > 1.0)
    throw ConfigError("triangular OVF requires 0 < rho_c < rho_max <= 1");
  if (!positive(p.v_max)) throw ConfigError("triangular OVF requires v_max > 0");
  if (!positive(p.vehicle_length)) throw ConfigError("triangular OVF requires vehicle_length > 0");
}

double Ovf::operator()(double h) const {
  return std::visit(Overloaded{[h](const CosineOvf& p) { return cosine_value(p, h); },
                               [h](const TriangularOvf& p) { return triangular_value(p, h); }},
                    params_);
}

double Ovf::derivative(double h) const {
  return std::visit(Overloaded{[h](const CosineOvf& p) { return cosine_slope(p, h); },
                               [this, h](const TriangularOvf& p) {
                                 // Breakpoints take the congested-branch slope.
                                 if (h < jam_headway() || h > free_headway()) return 0.0;
                                 return triangular_congested_slope(p);
                               }},
                    params_);
}

double Ovf::v_max() const {
  return std::visit([](const auto& p) { return p.v_max; }, params_);
}

double Ovf::vehicle_length() const {
  return std::visit([](const auto& p) { return p.vehicle_length; }, params_);
}

double Ovf::jam_headway() const {
  return std::visit(Overloaded{[](const CosineOvf& p) { return p.h_min; },
                               [](const TriangularOvf& p) { return p.vehicle_length / p.rho_max; }},
                    params_);
}

double Ovf::free_headway() const {
  return std::visit(Overloaded{[](const CosineOvf& p) { return p.h_max; },
                               [](const TriangularOvf& p) { return p.vehicle_length / p.rho_c; }},
                    params_);
}

bool Ovf::interacting(double h) const { return h > jam_headway() && h < free_headway(); }

std::vector<FdPoint> fundamental_diagram(const Ovf& ovf, std::size_t samples) {
  if (samples < 2) throw ContractViolation("fundamental_diagram needs at least 2 samples");
  const double k_max = 1.0 / ovf.jam_headway();
  std::vector<FdPoint> out;
  out.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const double k = k_max * static_cast<double>(s) / static_cast<double>(samples - 1);
    const double q = (k == 0.0) ? 0.0 : k * ovf(1.0 / k);
    out.push_back({k, q});
  }
  return out;
}

}  // namespace platoon
