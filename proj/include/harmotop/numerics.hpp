#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace harmotop {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Matrix transpose() const;
  double max_abs() const;

  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Gauss-Legendre rule with `order` nodes on (a, b).
QuadratureRule gauss_legendre(int order, double a, double b);

/// Gauss-Jacobi rule on (a, b) for the weight (b - x)^alpha (x - a)^beta,
/// built by Golub-Welsch on the Jacobi matrix.
QuadratureRule gauss_jacobi(int order, double alpha, double beta, double a, double b);

double log_gamma(double x);

/// ln Gamma(x + s) - ln Gamma(x) without forming either term when x is large.
double log_gamma_ratio(double x, double s);

double beta(double p, double q);
double log_beta(double p, double q);

/// Gegenbauer polynomial C_k^{(alpha)}(t) by the three-term recurrence.
double gegenbauer(int k, double alpha, double t);

/// Bessel function of the first kind, integer order k >= 0, x >= 0.
double bessel_j(int k, double x);

/// m-th positive zero of J_k (m >= 1).
double bessel_j_zero(int k, int m);

/// All positive zeros of J_k strictly below x_max, ascending.
std::vector<double> bessel_j_zeros_below(int k, double x_max);

/// Eigenvalues of a real symmetric matrix, ascending.
std::vector<double> symmetric_eigen(const Matrix& a);

struct EigenSystem {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j belongs to values[j]
};

EigenSystem symmetric_eigensystem(const Matrix& a);

/// Symmetric tridiagonal eigenproblem: diagonal `diag`, sub-diagonal
/// `off` (off.size() == diag.size() - 1).
EigenSystem tridiagonal_eigensystem(std::vector<double> diag, std::vector<double> off);

/// Least-squares solution of design * x ~ rhs (Householder QR). `design`
/// is rows x p with rows >= p.
std::vector<double> least_squares(const Matrix& design, std::span<const double> rhs);

}  // namespace harmotop
