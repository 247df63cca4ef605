#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace platoon::linalg {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  [[nodiscard]] double frobenius_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = M w for complex w.
[[nodiscard]] ComplexVector multiply(const Matrix& m, std::span<const Complex> w);

/// ||(M - lambda I) w||_2.
[[nodiscard]] double residual_norm(const Matrix& m, Complex lambda, std::span<const Complex> w);

/// Balanced, Hessenberg-reduced form of a square matrix:
///   original = D Q H Q^T D^{-1},  D = diag(scale), Q orthogonal, H upper Hessenberg.
/// All eigen-queries below go through this factorization.
class HessenbergForm {
 public:
  explicit HessenbergForm(const Matrix& m);

  [[nodiscard]] const Matrix& hessenberg() const { return h_; }
  [[nodiscard]] const Matrix& orthogonal() const { return q_; }
  [[nodiscard]] const std::vector<double>& scale() const { return scale_; }

  /// Eigenvalues by Francis double-shift QR. Complex pairs come out as
  /// adjacent conjugates. Throws SolverError if an eigenvalue fails to
  /// deflate within the iteration budget.
  [[nodiscard]] std::vector<Complex> eigenvalues(int max_iterations_per_eigenvalue = 60) const;

  /// Unit-norm eigenvector of the original matrix for a (computed) eigenvalue,
  /// by inverse iteration on H - lambda I. The largest component is made real
  /// and positive.
  [[nodiscard]] ComplexVector eigenvector(Complex lambda) const;

 private:
  Matrix h_;
  Matrix q_;
  std::vector<double> scale_;
};

struct EigenPair {
  Complex value;
  ComplexVector vector;
  double residual;  // ||(M - lambda I) w|| / ||M||_F with ||w|| = 1
};

struct Eigensystem {
  std::vector<EigenPair> pairs;
  double matrix_norm = 0.0;
  double max_residual = 0.0;
};

[[nodiscard]] std::vector<Complex> eigenvalues(const Matrix& m);

/// Every eigenpair, each residual-checked against `residual_tol`. Throws
/// SolverError on non-convergence or a residual above tolerance.
[[nodiscard]] Eigensystem eigensystem(const Matrix& m, double residual_tol = 1e-8);

}  // namespace platoon::linalg
