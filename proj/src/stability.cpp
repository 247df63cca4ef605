#include "platoon/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {
namespace {

constexpr double kTranslationSimilarity = 1.0 - 1e-8;
constexpr double kResidualTol = 1e-8;
constexpr double kCoincidentRoots = 1e-6;

void require_sensitivity(double a, double vprime) {
  if (!std::isfinite(a) || !std::isfinite(vprime) || vprime < 0.0)
    throw ContractViolation("stability criteria need finite a and V' >= 0");
}

// e^{i theta} - 1 without cancellation near theta = 0 mod 2 pi.
Complex ratio_minus_one(double theta) {
  const double half = std::sin(0.5 * theta);
  return {-2.0 * half * half, std::sin(theta)};
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::Stable ? "stable" : "unstable"; }

Verdict ovm_criterion(double a, double vprime) {
  require_sensitivity(a, vprime);
  if (a <= 0.0) throw ContractViolation("ovm_criterion needs a > 0");
  return a > 2.0 * vprime ? Verdict::Stable : Verdict::Unstable;
}

Verdict tovm_criterion(double a, double b, double vprime) {
  require_sensitivity(a, vprime);
  if (a < 0.0 || b < 0.0 || a + b <= 0.0) throw ContractViolation("tovm_criterion needs a, b >= 0, a + b > 0");
  if (a == 0.0) return Verdict::Stable;
  return (a + b) * (a + b) / a > 2.0 * vprime ? Verdict::Stable : Verdict::Unstable;
}

std::array<Complex, 2> povm_eigenvalues(double a, double vprime, std::size_t n) {
  if (n < 2) throw ContractViolation("povm_eigenvalues needs N >= 2");
  const double nm1 = static_cast<double>(n - 1);
  const Complex root = std::sqrt(Complex(a * a + 4.0 * a * vprime * (-1.0 / nm1 - 1.0), 0.0));
  return {(-a + root) / 2.0, (-a - root) / 2.0};
}

double root_match_distance(std::span<const Complex> spectrum, const std::array<Complex, 2>& roots) {
  if (spectrum.size() < 2) throw ContractViolation("root_match_distance needs at least two eigenvalues");
  auto by_distance = [&](const Complex& target) {
    std::vector<std::size_t> idx(spectrum.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t l, std::size_t r) {
      return std::abs(spectrum[l] - target) < std::abs(spectrum[r] - target);
    });
    return idx;
  };
  if (std::abs(roots[0] - roots[1]) < kCoincidentRoots) {
    const Complex centre = 0.5 * (roots[0] + roots[1]);
    const auto idx = by_distance(centre);
    const Complex centroid = 0.5 * (spectrum[idx[0]] + spectrum[idx[1]]);
    // The closed-form pair itself carries O(sqrt(eps)) error here, so only the
    // means are compared.
    return std::abs(centroid - centre);
  }
  double worst = 0.0;
  for (const auto& r : roots) worst = std::max(worst, std::abs(spectrum[by_distance(r)[0]] - r));
  return worst;
}

std::array<Complex, 2> mode_quadratic_roots(double damping, double coupling, double theta) {
  if (!(damping > 0.0)) throw ContractViolation("mode_quadratic_roots needs damping > 0");
  const Complex product = -coupling * ratio_minus_one(theta);
  const Complex disc = damping * damping - 4.0 * product;
  const Complex root = std::sqrt(disc);  // principal branch, Re >= 0
  const Complex big = (-damping - root) / 2.0;
  const Complex small = (big != Complex(0.0)) ? product / big : (-damping + root) / 2.0;
  return {small, big};
}

ModeAnalysis analyze_mode(double a, double vprime, std::size_t k, std::size_t n) {
  if (n == 0 || k < 1 || k > n) throw ContractViolation("analyze_mode needs 1 <= k <= N");
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  ModeAnalysis m{};
  m.k = k;
  m.theta = theta;
  m.ratio = std::polar(1.0, theta);
  m.lambda = mode_quadratic_roots(a, a * vprime, theta);
  m.d = a * a + 4.0 * a * vprime * std::cos(theta) - 4.0 * a * vprime;
  m.e = -4.0 * a * vprime * std::sin(theta);
  return m;
}

double mode_radical_value(double a, double vprime, double theta) {
  if (!(a > 0.0)) throw ContractViolation("mode_radical_value needs a > 0");
  const double d = a * a + 4.0 * a * vprime * std::cos(theta) - 4.0 * a * vprime;
  const double e = -4.0 * a * vprime * std::sin(theta);
  return a - std::sqrt(0.5 * (d + std::hypot(d, e)));
}

Verdict mode_radical_condition(double a, double vprime, double theta) {
  return mode_radical_value(a, vprime, theta) > 0.0 ? Verdict::Stable : Verdict::Unstable;
}

double mode_reduced_value(double a, double vprime, double theta) {
  const double c = std::cos(theta);
  return -vprime * c * c + a * c + vprime - a;
}

LinearizedSystem build_linearized(const ModelSpec& model, double vprime, std::size_t n) {
  if (n < 2) throw ContractViolation("build_linearized needs N >= 2");
  model.validate();
  const double a = model.a;
  const double b = model.b;
  const std::size_t lead = n - 1;

  linalg::Matrix k(n, n);
  std::vector<double> damping(n, 0.0);
  // Couples vehicle i to vehicle j with gain g: y_i'' += g (y_j - y_i).
  auto couple = [&](std::size_t i, std::size_t j, double g) {
    k(i, j) += g;
    k(i, i) -= g;
  };

  switch (model.kind) {
    case ModelKind::Ovm:
      for (std::size_t i = 0; i < n; ++i) couple(i, (i + 1) % n, a * vprime);
      std::fill(damping.begin(), damping.end(), a);
      break;
    case ModelKind::POvm:
      for (std::size_t i = 0; i < lead; ++i) couple(i, lead, a * vprime / static_cast<double>(lead - i));
      couple(lead, 0, a * vprime);
      std::fill(damping.begin(), damping.end(), a);
      break;
    case ModelKind::TOvm:
      for (std::size_t i = 0; i < lead; ++i) {
        couple(i, i + 1, a * vprime);
        couple(i, lead, b * vprime / static_cast<double>(lead - i));
      }
      couple(lead, 0, (a + b) * vprime);
      std::fill(damping.begin(), damping.end(), a + b);
      break;
    case ModelKind::FOvm:
      for (std::size_t i = 0; i < n; ++i) {
        couple(i, (i + 1) % n, a * vprime);
        couple(i, (i + 2) % n, 0.5 * b * vprime);
      }
      std::fill(damping.begin(), damping.end(), a + b);
      break;
  }

  LinearizedSystem sys;
  sys.model = model;
  sys.vprime = vprime;
  sys.n = n;
  sys.matrix = linalg::Matrix(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    sys.matrix(i, n + i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) sys.matrix(n + i, j) = k(i, j);
    sys.matrix(n + i, n + i) = -damping[i];
  }
  return sys;
}

double uniform_shift_similarity(std::span<const Complex> w, std::size_t n) {
  if (w.size() < n || n == 0) throw ContractViolation("uniform_shift_similarity: vector too short");
  Complex sum = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += w[i];
    norm2 += std::norm(w[i]);
  }
  if (norm2 == 0.0) return 0.0;
  return std::abs(sum) / (std::sqrt(norm2) * std::sqrt(static_cast<double>(n)));
}

bool is_translation_mode(std::span<const Complex> w, std::size_t n) {
  return uniform_shift_similarity(w, n) > kTranslationSimilarity;
}

SpectralReport spectral_analysis(const LinearizedSystem& sys) {
  const auto eig = linalg::eigensystem(sys.matrix, kResidualTol);
  SpectralReport rep;
  rep.abscissa = -std::numeric_limits<double>::infinity();
  rep.max_residual = eig.max_residual;
  for (const auto& p : eig.pairs) {
    const bool shift = is_translation_mode(p.vector, sys.n);
    rep.eigenvalues.push_back(p.value);
    rep.translation.push_back(shift);
    if (!shift && p.value.real() > rep.abscissa) {
      rep.abscissa = p.value.real();
      rep.dominant = p.value;
    }
  }
  return rep;
}

double spectral_abscissa(const LinearizedSystem& sys) {
  const linalg::HessenbergForm form(sys.matrix);
  auto values = form.eigenvalues();
  std::stable_sort(values.begin(), values.end(),
                   [](const Complex& l, const Complex& r) { return l.real() > r.real(); });
  const double norm = sys.matrix.frobenius_norm();
  for (const auto& lambda : values) {
    const auto w = form.eigenvector(lambda);
    if (is_translation_mode(w, sys.n)) continue;
    const double res = linalg::residual_norm(sys.matrix, lambda, w) / norm;
    if (!(res <= kResidualTol)) {
      std::ostringstream msg;
      msg << "dominant eigenpair failed residual check: lambda = " << lambda << ", residual " << res;
      throw SolverError(msg.str());
    }
    return lambda.real();
  }
  throw SolverError("spectral_abscissa: every eigenvalue was classified as a translation mode");
}

NeutralLine neutral_line(double fraction, double vp_min, double vp_max, std::size_t samples) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ContractViolation("neutral_line needs 0 <= f <= 1");
  if (samples < 2 || !(vp_min < vp_max)) throw ContractViolation("neutral_line needs a non-empty V' range");
  NeutralLine line;
  line.fraction = fraction;
  line.degenerate = fraction == 1.0;
  line.points.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const double vp =
        vp_min + (vp_max - vp_min) * static_cast<double>(s) / static_cast<double>(samples - 1);
    line.points.push_back({vp, line.degenerate ? 0.0 : 2.0 * vp * (1.0 - fraction)});
  }
  return line;
}

EigvecRatioReport eigvec_ratio_check(double a, double vprime, std::size_t n, double rel_tol) {
  if (n < 3) throw ContractViolation("eigvec_ratio_check needs N >= 3");
  const auto sys = build_linearized(ModelSpec{ModelKind::POvm, a, 0.0, LeaderRule::OvmFollowsFirst}, vprime, n);
  const auto eig = linalg::eigensystem(sys.matrix, kResidualTol);
  const Complex target = povm_eigenvalues(a, vprime, n)[0];
  const auto best = std::min_element(eig.pairs.begin(), eig.pairs.end(), [&](const auto& l, const auto& r) {
    return std::abs(l.value - target) < std::abs(r.value - target);
  });

  EigvecRatioReport rep;
  rep.lambda = best->value;
  const Complex y_lead = best->vector[n - 1];
  const double nn = static_cast<double>(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double jj = static_cast<double>(j);
    const Complex obs = best->vector[j - 1] / y_lead;
    const double ansatz = nn - jj + (jj - 1.0) / (nn - 1.0);
    const double derived = (nn - 1.0) / (nn - 1.0 - nn * (nn - jj));
    rep.observed.push_back(obs);
    rep.ansatz.push_back(ansatz);
    rep.derived.push_back(derived);
    rep.max_rel_error_ansatz = std::max(rep.max_rel_error_ansatz, std::abs(obs - ansatz) / std::abs(ansatz));
    rep.max_rel_error_derived = std::max(rep.max_rel_error_derived, std::abs(obs - derived) / std::abs(derived));
  }
  rep.ansatz_consistent = rep.max_rel_error_ansatz <= rel_tol;
  rep.derived_consistent = rep.max_rel_error_derived <= rel_tol;
  return rep;
}

}  // namespace platoon
