#include "platoon/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "platoon/error.hpp"
#include "platoon/rng.hpp"

namespace platoon::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ContractViolation("eigen-solver needs a non-empty square matrix");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double x : m.row(i))
      if (!std::isfinite(x)) throw ContractViolation("eigen-solver needs a finite matrix");
}

// Parlett-Reinsch balancing by powers of two (no permutations). Returns D
// with the matrix overwritten by D^{-1} A D.
std::vector<double> balance(Matrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  constexpr double radix2 = radix * radix;
  std::vector<double> scale(n, 1.0);
  bool converged = false;
  while (!converged) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      double g = r / radix;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        scale[i] *= f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return scale;
}

// Householder reduction to upper Hessenberg form; q accumulates the
// reflectors so that a_in = q h q^T.
void reduce_to_hessenberg(Matrix& h, Matrix& q) {
  const std::size_t n = h.rows();
  q = Matrix::identity(n);
  std::vector<double> u(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // reflector length
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(h(k + 1 + i, k)));
    if (scale == 0.0) continue;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = h(k + 1 + i, k) / scale;
      norm2 += u[i] * u[i];
    }
    double alpha = std::sqrt(norm2);
    if (u[0] > 0.0) alpha = -alpha;
    u[0] -= alpha;
    const double unorm2 = norm2 - 2.0 * alpha * (u[0] + alpha) + alpha * alpha;
    if (unorm2 <= 0.0) continue;
    const double beta = 2.0 / unorm2;

    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += u[i] * h(k + 1 + i, j);
      s *= beta;
      for (std::size_t i = 0; i < m; ++i) h(k + 1 + i, j) -= s * u[i];
    }
    auto apply_right = [&](Matrix& x) {
      for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += x(r, k + 1 + i) * u[i];
        s *= beta;
        for (std::size_t i = 0; i < m; ++i) x(r, k + 1 + i) -= s * u[i];
      }
    };
    apply_right(h);
    apply_right(q);

    h(k + 1, k) = alpha * scale;
    for (std::size_t i = 1; i < m; ++i) h(k + 1 + i, k) = 0.0;
  }
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix (destroyed). The
// iteration count restarts at every deflation; an exceptional shift is used
// after every 10 stagnant iterations.
std::vector<Complex> hessenberg_qr(Matrix a, int max_iterations) {
  const int n = static_cast<int>(a.rows());
  std::vector<Complex> w(static_cast<std::size_t>(n));
  auto at = [&a](int r, int c) -> double& {
    return a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(at(i, j));

  int nn = n - 1;
  double shift_total = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      // Look for a negligible subdiagonal element to split the problem.
      for (l = nn; l > 0; --l) {
        double s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(at(l, l - 1)) <= kEps * s) {
          at(l, l - 1) = 0.0;
          break;
        }
      }
      double x = at(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn)] = x + shift_total;
        --nn;
        its = 0;
        continue;
      }
      double y = at(nn - 1, nn - 1);
      double ww = at(nn, nn - 1) * at(nn - 1, nn);
      if (l == nn - 1) {
        const double p = 0.5 * (y - x);
        const double q = p * p + ww;
        double z = std::sqrt(std::abs(q));
        x += shift_total;
        if (q >= 0.0) {
          z = p + sign_of(z, p);
          w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
          if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
        } else {
          w[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
          w[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
        }
        nn -= 2;
        its = 0;
        continue;
      }

      if (its == max_iterations) {
        std::ostringstream msg;
        msg << "QR iteration did not converge: eigenvalue " << nn << " of " << n << " after " << its
            << " iterations, |subdiagonal| = " << std::abs(at(nn, nn - 1));
        throw SolverError(msg.str());
      }
      if (its > 0 && its % 10 == 0) {
        shift_total += x;
        for (int i = 0; i <= nn; ++i) at(i, i) -= x;
        const double s = std::abs(at(nn, nn - 1)) + std::abs(at(nn - 1, nn - 2));
        x = y = 0.75 * s;
        ww = -0.4375 * s * s;
      }
      ++its;

      // Find two consecutive small subdiagonal elements.
      int m = nn - 2;
      double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
      for (; m >= l; --m) {
        z = at(m, m);
        r = x - z;
        double s = y - z;
        p = (r * s - ww) / at(m + 1, m) + at(m, m + 1);
        q = at(m + 1, m + 1) - z - r - s;
        r = at(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double u = std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r));
        const double v = std::abs(p) * (std::abs(at(m - 1, m - 1)) + std::abs(z) + std::abs(at(m + 1, m + 1)));
        if (u <= kEps * v) break;
      }
      for (int i = m; i < nn - 1; ++i) {
        at(i + 2, i) = 0.0;
        if (i != m) at(i + 2, i - 1) = 0.0;
      }

      // Double-shift QR sweep on rows/columns l..nn, starting at m.
      for (int k = m; k < nn; ++k) {
        if (k != m) {
          p = at(k, k - 1);
          q = at(k + 1, k - 1);
          r = (k + 1 != nn) ? at(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) at(k, k - 1) = -at(k, k - 1);
        } else {
          at(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {
          double t = at(k, j) + q * at(k + 1, j);
          if (k + 1 != nn) {
            t += r * at(k + 2, j);
            at(k + 2, j) -= t * z;
          }
          at(k + 1, j) -= t * y;
          at(k, j) -= t * x;
        }
        const int imax = std::min(nn, k + 3);
        for (int i = l; i <= imax; ++i) {
          double t = x * at(i, k) + y * at(i, k + 1);
          if (k + 1 != nn) {
            t += z * at(i, k + 2);
            at(i, k + 2) -= t * r;
          }
          at(i, k + 1) -= t * q;
          at(i, k) -= t;
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

void normalize_phase(ComplexVector& w) {
  double norm2 = 0.0;
  std::size_t big = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    norm2 += std::norm(w[i]);
    if (std::abs(w[i]) > std::abs(w[big])) big = i;
  }
  if (norm2 == 0.0) return;
  const Complex phase = std::conj(w[big]) / std::abs(w[big]);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : w) c *= phase * inv;
  w[big] = Complex(w[big].real(), 0.0);
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

ComplexVector multiply(const Matrix& m, std::span<const Complex> w) {
  if (w.size() != m.cols()) throw ContractViolation("multiply: dimension mismatch");
  ComplexVector y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Complex acc = 0.0;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * w[c];
    y[r] = acc;
  }
  return y;
}

double residual_norm(const Matrix& m, Complex lambda, std::span<const Complex> w) {
  const auto mw = multiply(m, w);
  double s = 0.0;
  for (std::size_t i = 0; i < mw.size(); ++i) s += std::norm(mw[i] - lambda * w[i]);
  return std::sqrt(s);
}

HessenbergForm::HessenbergForm(const Matrix& m) : h_(m) {
  require_square(m);
  scale_ = balance(h_);
  reduce_to_hessenberg(h_, q_);
}

std::vector<Complex> HessenbergForm::eigenvalues(int max_iterations_per_eigenvalue) const {
  return hessenberg_qr(h_, max_iterations_per_eigenvalue);
}

ComplexVector HessenbergForm::eigenvector(Complex lambda) const {
  const std::size_t n = h_.rows();
  // Pivot floor relative to ||H||; a zero matrix falls back to unit scale so
  // the solve stays finite.
  const double hnorm = h_.frobenius_norm();
  const double tiny = kEps * (hnorm > 0.0 ? hnorm : 1.0);

  // LU with adjacent-row pivoting of H - lambda I keeps the Hessenberg profile.
  std::vector<Complex> u(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = (r == 0 ? 0 : r - 1); c < n; ++c) u[r * n + c] = h_(r, c);
  for (std::size_t i = 0; i < n; ++i) u[i * n + i] -= lambda;

  std::vector<bool> swapped(n, false);
  std::vector<Complex> mult(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Complex* rk = &u[k * n];
    Complex* rk1 = &u[(k + 1) * n];
    if (std::abs(rk1[k]) > std::abs(rk[k])) {
      std::swap_ranges(rk + k, rk + n, rk1 + k);
      swapped[k] = true;
    }
    if (std::abs(rk[k]) < tiny) rk[k] = tiny;
    const Complex l = rk1[k] / rk[k];
    mult[k] = l;
    rk1[k] = 0.0;
    for (std::size_t j = k + 1; j < n; ++j) rk1[j] -= l * rk[j];
  }
  if (std::abs(u[n * n - 1]) < tiny) u[n * n - 1] = tiny;

  // Deterministic generic start vector; the all-ones vector is orthogonal to
  // the left eigenvectors of circulant systems and would stall.
  SplitMix64 rng(0x5EEDF00DULL);
  std::vector<Complex> z(n);
  for (auto& c : z) c = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);

  // Near a defective eigenvalue further steps drift toward the eigenvector of
  // the unsplit root and the residual grows to O(sqrt(eps)), so the iterate
  // with the smallest ||(H - lambda I) z|| is kept.
  std::vector<Complex> best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 3; ++it) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (swapped[k]) std::swap(z[k], z[k + 1]);
      z[k + 1] -= mult[k] * z[k];
    }
    for (std::size_t r = n; r-- > 0;) {
      Complex acc = z[r];
      for (std::size_t c = r + 1; c < n; ++c) acc -= u[r * n + c] * z[c];
      z[r] = acc / u[r * n + r];
    }
    double norm2 = 0.0;
    for (const auto& c : z) norm2 += std::norm(c);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : z) c *= inv;

    double res2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      Complex acc = -lambda * z[r];
      for (std::size_t c = (r == 0 ? 0 : r - 1); c < n; ++c) acc += h_(r, c) * z[c];
      res2 += std::norm(acc);
    }
    if (res2 < best_res) {
      best_res = res2;
      best = z;
    }
  }
  z = std::move(best);

  ComplexVector w(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    Complex acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += q_(r, c) * z[c];
    w[r] = scale_[r] * acc;
  }
  normalize_phase(w);
  return w;
}

std::vector<Complex> eigenvalues(const Matrix& m) { return HessenbergForm(m).eigenvalues(); }

Eigensystem eigensystem(const Matrix& m, double residual_tol) {
  const HessenbergForm form(m);
  const auto values = form.eigenvalues();
  Eigensystem sys;
  sys.matrix_norm = m.frobenius_norm();
  const double denom = sys.matrix_norm > 0.0 ? sys.matrix_norm : 1.0;
  sys.pairs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex lambda = values[i];
    ComplexVector w;
    if (i > 0 && lambda.imag() != 0.0 && values[i - 1] == std::conj(lambda)) {
      w = sys.pairs.back().vector;
      for (auto& c : w) c = std::conj(c);
    } else {
      w = form.eigenvector(lambda);
    }
    const double res = residual_norm(m, lambda, w) / denom;
    if (!(res <= residual_tol)) {
      std::ostringstream msg;
      msg << "eigenpair residual check failed for lambda = " << lambda << ": " << res << " > " << residual_tol;
      throw SolverError(msg.str());
    }
    sys.max_residual = std::max(sys.max_residual, res);
    sys.pairs.push_back({lambda, std::move(w), res});
  }
  return sys;
}

}  // namespace platoon::linalg
