#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "platoon/error.hpp"
#include "platoon/metrics.hpp"
#include "platoon/rng.hpp"
#include "platoon/sim.hpp"
#include "platoon/stability.hpp"
#include "support.hpp"

using namespace platoon;

namespace {

constexpr double kPi = std::numbers::pi;
const double kVp = kPi / 3.0;  // V'(22) for cosine(7, 37, 20)

double max_real(const std::array<Complex, 2>& r) { return std::max(r[0].real(), r[1].real()); }

// Finite-mode oracle for the OVM ring: every Fourier mode k = 1..N-1 plus the
// non-translation root -a of the k = N mode.
double ovm_mode_abscissa(double a, double vp, std::size_t n) {
  double best = -a;
  for (std::size_t k = 1; k < n; ++k) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    // Textbook quadratic formula, independent of the library's stable variant.
    const Complex c = a * vp * (std::polar(1.0, theta) - 1.0);
    const Complex disc = std::sqrt(Complex(a * a) + 4.0 * c);
    best = std::max({best, ((-a + disc) / 2.0).real(), ((-a - disc) / 2.0).real()});
  }
  return best;
}

ModelSpec spec(ModelKind k, double a, double b = 0.0) { return ModelSpec{k, a, b, LeaderRule::OvmFollowsFirst}; }

}  // namespace

TEST_SUITE("stability") {
  TEST_CASE("OVM criterion") {
    CHECK(ovm_criterion(2.4, kVp) == Verdict::Stable);
    CHECK(ovm_criterion(1.6, kVp) == Verdict::Unstable);
    CHECK(ovm_criterion(0.01, 0.0) == Verdict::Stable);
    CHECK(ovm_criterion(2.0, 1.0) == Verdict::Unstable);  // equality is neutral
    CHECK_THROWS_AS((void)ovm_criterion(0.0, 1.0), ContractViolation);
  }

  TEST_CASE("T-OVM criterion") {
    CHECK(tovm_criterion(0.1, 0.5, kVp) == Verdict::Stable);
    CHECK(tovm_criterion(0.5, 0.1, kVp) == Verdict::Unstable);
    CHECK((0.1 + 0.5) * (0.1 + 0.5) / 0.1 == doctest::Approx(3.6));
    CHECK((0.5 + 0.1) * (0.5 + 0.1) / 0.5 == doctest::Approx(0.72));
    CHECK(tovm_criterion(0.0, 0.7, kVp) == Verdict::Stable);
    SplitMix64 rng(4);
    for (int i = 0; i < 2000; ++i) {
      const double a = 0.01 + 3.0 * rng.uniform();
      const double vp = 2.0 * rng.uniform();
      CHECK(tovm_criterion(a, 0.0, vp) == ovm_criterion(a, vp));
    }
  }

  TEST_CASE("P-OVM closed-form eigenvalues") {
    const auto lam = povm_eigenvalues(1.0, kVp, 12);
    // Independent evaluation: the discriminant 1 - 4 (pi/3)(12/11) is negative.
    const double imag = std::sqrt(4.0 * kVp * 12.0 / 11.0 - 1.0) / 2.0;
    CHECK(imag == doctest::Approx(0.944668).epsilon(1e-6));
    CHECK(lam[0].real() == doctest::Approx(-0.5));
    CHECK(lam[1].real() == doctest::Approx(-0.5));
    CHECK(std::abs(lam[0].imag()) == doctest::Approx(imag).epsilon(1e-14));
    CHECK(lam[0].imag() == doctest::Approx(-lam[1].imag()));

    SplitMix64 rng(8);
    for (int i = 0; i < 5000; ++i) {
      const double a = 0.01 + 5.0 * rng.uniform();
      const double vp = 1e-6 + 3.0 * rng.uniform();
      const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 100.0);
      const auto r = povm_eigenvalues(a, vp, n);
      CHECK(r[0].real() < 0.0);
      CHECK(r[1].real() < 0.0);
    }
    const auto limit = povm_eigenvalues(1.3, 1e-12, 12);
    CHECK(std::abs(limit[0]) < 1e-10);
    CHECK(std::abs(limit[1] + 1.3) < 1e-10);
  }

  TEST_CASE("closed-form P-OVM roots appear in the computed spectrum") {
    const auto sys = build_linearized(spec(ModelKind::POvm, 1.0), kVp, 12);
    const auto rep = spectral_analysis(sys);
    CHECK(root_match_distance(rep.eigenvalues, povm_eigenvalues(1.0, kVp, 12)) < 1e-8);
  }

  TEST_CASE("root matching uses the cluster centroid for a double root") {
    const std::vector<Complex> split{Complex(-0.9 + 7e-8, 0.0), Complex(-0.9 - 7e-8, 0.0), Complex(-3.0, 0.0)};
    CHECK(root_match_distance(split, {Complex(-0.9), Complex(-0.9)}) < 1e-15);
    // A closed-form pair split along the imaginary axis by a rounding-level
    // negative discriminant matches a real split of the computed pair.
    CHECK(root_match_distance(split, {Complex(-0.9, 2e-8), Complex(-0.9, -2e-8)}) < 1e-15);
    const std::vector<Complex> distinct{Complex(-1.0), Complex(-2.0), Complex(-3.0)};
    CHECK(root_match_distance(distinct, {Complex(-1.0 + 1e-9), Complex(-3.0)}) == doctest::Approx(1e-9));
  }

  TEST_CASE("mode quadratic: translation mode, Vieta relations") {
    const auto t = mode_quadratic_roots(1.7, 1.7 * kVp, 2.0 * kPi);
    CHECK(std::abs(max_real(t)) < 1e-12);
    CHECK(std::min(t[0].real(), t[1].real()) == doctest::Approx(-1.7));

    SplitMix64 rng(12);
    for (int i = 0; i < 2000; ++i) {
      const double d = 0.01 + 4.0 * rng.uniform();
      const double c = 4.0 * rng.uniform();
      const double theta = 2.0 * kPi * rng.uniform();
      const auto r = mode_quadratic_roots(d, c, theta);
      const Complex p = -c * (std::polar(1.0, theta) - 1.0);
      CHECK(std::abs(r[0] + r[1] + d) < 1e-10 * (1.0 + d));
      CHECK(std::abs(r[0] * r[1] - p) < 1e-10 * (1.0 + std::abs(p)));
    }
  }

  TEST_CASE("mode quadratic at the neutral sensitivity a = 2V'") {
    const double a = 2.0 * kVp;
    double worst = -1.0;
    for (double theta : {1e-3, 1e-2, 0.05}) worst = std::max(worst, max_real(mode_quadratic_roots(a, a * kVp, theta)));
    CHECK(std::abs(worst) < 1e-6);
    CHECK(worst <= 0.0);
    // Just below the threshold long waves grow; just above they decay.
    CHECK(max_real(mode_quadratic_roots(0.95 * a, 0.95 * a * kVp, 0.05)) > 0.0);
    CHECK(max_real(mode_quadratic_roots(1.05 * a, 1.05 * a * kVp, 0.05)) < 0.0);
  }

  TEST_CASE("mode quadratic: a = 3 is stable on a 720-point grid") {
    for (int k = 1; k < 720; ++k) {
      const double theta = 2.0 * kPi * k / 720.0;
      CHECK(max_real(mode_quadratic_roots(3.0, 3.0 * kVp, theta)) < 0.0);
    }
  }

  TEST_CASE("radical condition") {
    CHECK(std::abs(mode_radical_value(1.4, kVp, 2.0 * kPi)) < 1e-12);
    const auto r = mode_quadratic_roots(1.6, 1.6 * kVp, kPi / 3.0);
    const auto v = mode_radical_condition(1.6, kVp, kPi / 3.0);
    CHECK((max_real(r) < 0.0) == (v == Verdict::Stable));
    const auto m = analyze_mode(1.6, kVp, 2, 12);
    CHECK(m.theta == doctest::Approx(kPi / 3.0));
    CHECK(std::abs(m.ratio) == doctest::Approx(1.0));
    CHECK(m.d == doctest::Approx(1.6 * 1.6 + 4 * 1.6 * kVp * 0.5 - 4 * 1.6 * kVp));
    CHECK(m.e == doctest::Approx(-4 * 1.6 * kVp * std::sin(kPi / 3.0)));
  }

  TEST_CASE("radical, reduced and quadratic forms agree on random samples") {
    SplitMix64 rng(2024);
    int compared = 0;
    for (int i = 0; i < 10000; ++i) {
      const double a = 0.05 + 3.0 * rng.uniform();
      const double vp = 0.05 + 2.0 * rng.uniform();
      const double theta = 2.0 * kPi * rng.uniform();
      const double quad = max_real(mode_quadratic_roots(a, a * vp, theta));
      const double rad = mode_radical_value(a, vp, theta);
      const double red = mode_reduced_value(a, vp, theta);
      if (std::abs(quad) < 1e-8 || std::abs(rad) < 1e-8 || std::abs(red) < 1e-8) continue;
      ++compared;
      CHECK((quad < 0.0) == (rad > 0.0));
      CHECK((quad < 0.0) == (red < 0.0));
    }
    CHECK(compared > 9900);
  }

  TEST_CASE("linearized OVM ring, N = 3") {
    const double a = 1.3;
    const double vp = 0.7;
    const auto sys = build_linearized(spec(ModelKind::Ovm, a), vp, 3);
    const auto& m = sys.matrix;
    REQUIRE(m.rows() == 6);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double shift = (j == (i + 1) % 3) ? 1.0 : 0.0;
        const double ident = i == j ? 1.0 : 0.0;
        CHECK(m(3 + i, j) == doctest::Approx(a * vp * (shift - ident)));
        CHECK(m(i, 3 + j) == ident);
        CHECK(m(i, j) == 0.0);
        CHECK(m(3 + i, 3 + j) == -a * ident);
      }
  }

  TEST_CASE("linearized T-OVM rows") {
    const double a = 0.4;
    const double b = 0.3;
    const double vp = 0.9;
    const std::size_t n = 5;
    const auto m = build_linearized(spec(ModelKind::TOvm, a, b), vp, n).matrix;
    // Follower i (0-based) couples to i+1 with aV' and to the leader with bV'/(N-1-i).
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double to_leader = b * vp / static_cast<double>(n - 1 - i);
      if (i + 2 < n) {
        CHECK(m(n + i, i + 1) == doctest::Approx(a * vp));
        CHECK(m(n + i, n - 1) == doctest::Approx(to_leader));
      } else {
        CHECK(m(n + i, n - 1) == doctest::Approx(a * vp + to_leader));
      }
      CHECK(m(n + i, i) == doctest::Approx(-a * vp - to_leader));
      CHECK(m(n + i, n + i) == doctest::Approx(-(a + b)));
    }
    CHECK(m(2 * n - 1, 0) == doctest::Approx((a + b) * vp));
    CHECK(m(2 * n - 1, n - 1) == doctest::Approx(-(a + b) * vp));
  }

  TEST_CASE("T-OVM with b = 0 is the OVM ring matrix") {
    for (std::size_t n : {2u, 3u, 12u}) {
      const auto t = build_linearized(spec(ModelKind::TOvm, 0.8), kVp, n).matrix;
      const auto o = build_linearized(spec(ModelKind::Ovm, 0.8), kVp, n).matrix;
      CHECK(t == o);
    }
  }

  TEST_CASE("uniform shift lies in the kernel of every ring system") {
    for (auto [kind, b] : {std::pair{ModelKind::Ovm, 0.0}, std::pair{ModelKind::POvm, 0.0},
                           std::pair{ModelKind::TOvm, 0.5}, std::pair{ModelKind::FOvm, 0.5}}) {
      const std::size_t n = 9;
      const auto m = build_linearized(spec(kind, 0.7, b), 1.1, n).matrix;
      std::vector<Complex> shift(2 * n, 0.0);
      std::fill(shift.begin(), shift.begin() + static_cast<std::ptrdiff_t>(n), Complex(1.0));
      for (auto c : linalg::multiply(m, shift)) CHECK(std::abs(c) < 1e-14);
    }
  }

  TEST_CASE("translation-mode classification") {
    const std::vector<Complex> ones(6, Complex(0.3, 0.1));
    CHECK(uniform_shift_similarity(ones, 6) == doctest::Approx(1.0));
    CHECK(is_translation_mode(ones, 6));
    const std::vector<Complex> alt{1, -1, 1, -1, 1, -1};
    CHECK(uniform_shift_similarity(alt, 6) == doctest::Approx(0.0));
    CHECK_FALSE(is_translation_mode(alt, 6));

    const auto rep = spectral_analysis(build_linearized(spec(ModelKind::Ovm, 1.0), kVp, 12));
    CHECK(std::count(rep.translation.begin(), rep.translation.end(), true) == 2);
  }

  TEST_CASE("spectral abscissa: OVM ring and P-OVM verdicts at N = 12") {
    CHECK(spectral_abscissa(build_linearized(spec(ModelKind::Ovm, 2.4), kVp, 12)) < 0.0);
    CHECK(spectral_abscissa(build_linearized(spec(ModelKind::Ovm, 1.6), kVp, 12)) > 0.0);
    for (double a : {0.4, 0.8, 1.6, 2.4})
      CHECK(spectral_abscissa(build_linearized(spec(ModelKind::POvm, a), kVp, 12)) < 0.0);
  }

  TEST_CASE("lazy and full spectral abscissa agree") {
    SplitMix64 rng(31);
    for (int i = 0; i < 20; ++i) {
      const auto kind = static_cast<ModelKind>(static_cast<int>(rng.uniform() * 4.0));
      const double b = (kind == ModelKind::TOvm || kind == ModelKind::FOvm) ? rng.uniform() : 0.0;
      const auto sys = build_linearized(spec(kind, 0.1 + 2.0 * rng.uniform(), b), 0.2 + rng.uniform(),
                                        3 + static_cast<std::size_t>(rng.uniform() * 20.0));
      CHECK(spectral_abscissa(sys) == doctest::Approx(spectral_analysis(sys).abscissa).epsilon(1e-12));
    }
  }

  TEST_CASE("OVM ring spectral abscissa equals the finite-mode oracle") {
    for (double a : {0.3, 0.9, 1.5, 2.2, 3.0})
      for (double vp : {0.2, 0.6, 1.0, 1.4, 2.0})
        for (std::size_t n : {3u, 5u, 12u, 25u, 40u}) {
          const double oracle = ovm_mode_abscissa(a, vp, n);
          const double computed = spectral_abscissa(build_linearized(spec(ModelKind::Ovm, a), vp, n));
          CHECK(computed == doctest::Approx(oracle).epsilon(1e-8).scale(1.0));
          if (std::abs(oracle) > 1e-9) CHECK((computed < 0.0) == (oracle < 0.0));
          // The asymptotic criterion is only an upper bound on instability for finite N.
          if (ovm_criterion(a, vp) == Verdict::Stable) CHECK(oracle < 1e-12);
        }
  }

  TEST_CASE("neutral lines") {
    const auto f0 = neutral_line(0.0, 0.0, 2.0, 21);
    for (const auto& [vp, s] : f0.points) CHECK(s == doctest::Approx(2.0 * vp));
    const auto f8 = neutral_line(0.8, 1.0, 2.0, 2);
    CHECK(f8.points[0][1] == doctest::Approx(0.4));
    const auto one = neutral_line(1.0, 0.0, 2.0, 5);
    CHECK(one.degenerate);
    for (const auto& p : one.points) CHECK(p[1] == 0.0);
    CHECK_THROWS_AS((void)neutral_line(-0.1, 0.0, 1.0, 5), ContractViolation);
    CHECK_THROWS_AS((void)neutral_line(1.1, 0.0, 1.0, 5), ContractViolation);
    CHECK_THROWS_AS((void)neutral_line(0.2, 1.0, 1.0, 5), ContractViolation);
  }

  TEST_CASE("neutral lines are strictly ordered in the fraction") {
    const std::vector<double> fr{0.0, 0.2, 0.4, 0.6, 0.8};
    std::vector<NeutralLine> lines;
    for (double f : fr) lines.push_back(neutral_line(f, 0.0, 2.0, 41));
    for (std::size_t l = 1; l < lines.size(); ++l)
      for (std::size_t p = 1; p < 41; ++p) CHECK(lines[l].points[p][1] < lines[l - 1].points[p][1]);
  }

  TEST_CASE("neutral line matches the T-OVM criterion boundary") {
    SplitMix64 rng(90);
    for (int i = 0; i < 1000; ++i) {
      const double f = 0.95 * rng.uniform();
      const double vp = 0.1 + 2.0 * rng.uniform();
      const double s_line = neutral_line(f, vp, vp + 1.0, 2).points[0][1];
      for (double factor : {0.98, 1.02}) {
        const double s = factor * s_line;
        const auto verdict = tovm_criterion(s * (1.0 - f), s * f, vp);
        CHECK(verdict == (factor > 1.0 ? Verdict::Stable : Verdict::Unstable));
      }
    }
  }

  TEST_CASE("P-OVM eigenvector ratios") {
    for (std::size_t n : {3u, 5u, 12u}) {
      const auto rep = eigvec_ratio_check(1.0, kVp, n);
      CHECK(rep.derived_consistent);
      CHECK(rep.max_rel_error_derived < 1e-9);
      CHECK(rep.ansatz.back() == 1.0);
      CHECK(rep.derived.back() == 1.0);
      CHECK(std::abs(rep.observed.back() - 1.0) < 1e-12);
      // The derived first component is -1/(N-1).
      CHECK(rep.observed.front().real() == doctest::Approx(-1.0 / static_cast<double>(n - 1)).epsilon(1e-9));
      // The stated ansatz disagrees with the computed eigenvector.
      CHECK_FALSE(rep.ansatz_consistent);
    }
    CHECK(eigvec_ratio_check(1.0, kVp, 12).ansatz.front() == 11.0);
    CHECK(eigvec_ratio_check(1.0, kVp, 3).ansatz[1] == 1.5);
    CHECK_THROWS_AS((void)eigvec_ratio_check(1.0, kVp, 2), ContractViolation);
  }

  TEST_CASE("simulation growth or decay matches the spectral abscissa sign") {
    struct Case {
      ModelKind kind;
      double a;
      double b;
    };
    const Case cases[] = {{ModelKind::Ovm, 0.4, 0},   {ModelKind::Ovm, 0.8, 0},   {ModelKind::Ovm, 1.6, 0},
                          {ModelKind::Ovm, 2.4, 0},   {ModelKind::POvm, 0.4, 0},  {ModelKind::POvm, 2.4, 0},
                          {ModelKind::TOvm, 0.1, 0.5}, {ModelKind::TOvm, 0.5, 0.1}, {ModelKind::TOvm, 0.6, 0.6},
                          {ModelKind::TOvm, 1.0, 0.2}, {ModelKind::TOvm, 0.2, 0.4}, {ModelKind::FOvm, 0.2, 0.4}};
    for (const auto& c : cases) {
      CAPTURE(to_string(c.kind));
      CAPTURE(c.a);
      CAPTURE(c.b);
      RingScenario scn;
      scn.model = spec(c.kind, c.a, c.b);
      const auto traj = run_ring(scn, SimConfig{});
      double early = 0.0;
      for (double h : traj.h.front()) early = std::max(early, std::abs(h - 22.0));
      const double late = max_headway_deviation(traj, 22.0, 250.0);
      const double abscissa = spectral_abscissa(build_linearized(scn.model, kVp, 12));
      CHECK((late > early) == (abscissa > 0.0));
    }
  }
}
