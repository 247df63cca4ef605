#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>

#include "platoon/models.hpp"
#include "platoon/rng.hpp"

namespace test {

inline const platoon::Ovf& cosine() {
  static const platoon::Ovf ovf{platoon::CosineOvf{}};
  return ovf;
}

inline const platoon::Ovf& triangular() {
  static const platoon::Ovf ovf{platoon::TriangularOvf{}};
  return ovf;
}

/// x_j = h (j + 1) + shift, v_j = V(h), optionally on a ring of length N h.
inline platoon::PlatoonState uniform_state(std::size_t n, double h, const platoon::Ovf& ovf, bool ring,
                                           double shift = 0.0) {
  platoon::PlatoonState s;
  for (std::size_t j = 0; j < n; ++j) {
    s.x.push_back(h * static_cast<double>(j + 1) + shift);
    s.v.push_back(ovf(h));
  }
  if (ring) s.ring_length = h * static_cast<double>(n);
  return s;
}

/// Ordered random state with headways in [lo, hi] and speeds in [0, 20].
inline platoon::PlatoonState random_state(platoon::SplitMix64& rng, std::size_t n, bool ring, double lo = 8.0,
                                          double hi = 36.0) {
  platoon::PlatoonState s;
  double x = 100.0 * rng.uniform();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s.x.push_back(x);
    s.v.push_back(20.0 * rng.uniform());
    const double h = lo + (hi - lo) * rng.uniform();
    x += h;
    total += h;
  }
  if (ring) s.ring_length = total;
  return s;
}

inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(PLATOON_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test
