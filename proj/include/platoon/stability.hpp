#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "platoon/linalg.hpp"
#include "platoon/models.hpp"

namespace platoon {

using linalg::Complex;

/// Linear string-stability verdict. Exact equality at a threshold counts as
/// unstable (neutral).
enum class Verdict { Stable, Unstable };

[[nodiscard]] std::string_view to_string(Verdict v);

/// OVM on a ring: stable iff a > 2 V'(h).
[[nodiscard]] Verdict ovm_criterion(double a, double vprime);

/// T-OVM for large N: stable iff (a + b)^2 / a > 2 V'(h). a = 0 is pure
/// leader-following, which is always stable.
[[nodiscard]] Verdict tovm_criterion(double a, double b, double vprime);

/// Closed-form non-trivial eigenvalues of the P-OVM (y_1, y_N) subsystem:
///   lambda^2 + a lambda + a V' N / (N - 1) = 0.
[[nodiscard]] std::array<Complex, 2> povm_eigenvalues(double a, double vprime, std::size_t n);

/// Largest distance from either target root to the computed spectrum. When the
/// two targets lie within 1e-6 of each other (a defective or nearly defective
/// double root) the centroid of the two nearest computed eigenvalues is
/// compared with the targets' mean instead: both the solver and the
/// closed-form square root split such a pair by O(sqrt(eps)), while the means
/// stay accurate.
[[nodiscard]] double root_match_distance(std::span<const Complex> spectrum,
                                         const std::array<Complex, 2>& roots);

/// Roots of lambda^2 + damping lambda - coupling (e^{i theta} - 1) = 0, the
/// characteristic equation of a Fourier mode with neighbour ratio e^{i theta}.
/// OVM: damping = a, coupling = a V'. T-OVM (large N): damping = a + b,
/// coupling = a V'.
[[nodiscard]] std::array<Complex, 2> mode_quadratic_roots(double damping, double coupling,
                                                          double theta);

/// Per-mode view of the OVM ring for mode index k (theta = 2 pi k / N).
struct ModeAnalysis {
  std::size_t k;
  double theta;
  Complex ratio;  // e^{i theta}
  std::array<Complex, 2> lambda;
  double d;  // real part of the discriminant
  double e;  // imaginary part (sign as conventionally written, -4 a V' sin theta)
};

[[nodiscard]] ModeAnalysis analyze_mode(double a, double vprime, std::size_t k, std::size_t n);

/// a - sqrt((d + sqrt(d^2 + e^2)) / 2); positive means the mode decays.
[[nodiscard]] double mode_radical_value(double a, double vprime, double theta);
[[nodiscard]] Verdict mode_radical_condition(double a, double vprime, double theta);

/// -V' cos^2 theta + a cos theta + V' - a; negative means the mode decays.
[[nodiscard]] double mode_reduced_value(double a, double vprime, double theta);

/// First-order form of the linearised ring platoon around uniform flow,
/// state [y_1..y_N, y'_1..y'_N]:
///   [ 0  I ]
///   [ K  -diag(damping) ]
/// The leader (last row) follows vehicle 1 by OVM with sensitivity a (a + b
/// for T-OVM). F-OVM is homogeneous around the ring.
struct LinearizedSystem {
  linalg::Matrix matrix;
  ModelSpec model;
  double vprime = 0.0;
  std::size_t n = 0;
};

[[nodiscard]] LinearizedSystem build_linearized(const ModelSpec& model, double vprime,
                                                std::size_t n);

/// Cosine similarity between the position block of w and the all-ones vector.
[[nodiscard]] double uniform_shift_similarity(std::span<const Complex> w, std::size_t n);

/// True for eigenvectors of the uniform-shift (translation) modes.
[[nodiscard]] bool is_translation_mode(std::span<const Complex> w, std::size_t n);

struct SpectralReport {
  double abscissa = 0.0;  // max Re over non-translation eigenvalues
  Complex dominant;
  std::vector<Complex> eigenvalues;
  std::vector<bool> translation;
  double max_residual = 0.0;  // relative to ||M||_F
};

/// Full eigen-decomposition with residual checks on every eigenpair.
[[nodiscard]] SpectralReport spectral_analysis(const LinearizedSystem& sys);

/// Max real part over eigenvalues, skipping the translation modes. Only the
/// eigenvectors needed to classify the leading eigenvalues are computed; the
/// reported eigenpair is residual-checked. Throws SolverError on failure.
[[nodiscard]] double spectral_abscissa(const LinearizedSystem& sys);

struct NeutralLine {
  double fraction = 0.0;  // b / (a + b)
  bool degenerate = false;  // fraction == 1: no unstable region at all
  std::vector<std::array<double, 2>> points;  // (V', threshold total sensitivity)
};

/// T-OVM neutral line s = 2 V' (1 - f) in the (V', s = a + b) plane, sampled
/// uniformly over [vp_min, vp_max].
[[nodiscard]] NeutralLine neutral_line(double fraction, double vp_min, double vp_max,
                                       std::size_t samples);

/// Compares the position components of the P-OVM eigenvector at the
/// closed-form eigenvalue against two candidate ratio laws y_j / y_N:
///   ansatz:  zeta_j = N - j + (j - 1)/(N - 1)
///   derived: (N - 1) / (N - 1 - N (N - j)), from substituting the eigenvalue
///            into each follower row.
struct EigvecRatioReport {
  Complex lambda;
  std::vector<Complex> observed;  // y_j / y_N, j = 1..N
  std::vector<double> ansatz;
  std::vector<double> derived;
  double max_rel_error_ansatz = 0.0;
  double max_rel_error_derived = 0.0;
  bool ansatz_consistent = false;
  bool derived_consistent = false;
};

[[nodiscard]] EigvecRatioReport eigvec_ratio_check(double a, double vprime, std::size_t n,
                                                   double rel_tol = 1e-6);

}  // namespace platoon
