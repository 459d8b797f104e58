#include "harmotop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace harmotop {

namespace {

constexpr double kPi = std::numbers::pi;

// Bernoulli numbers B_{2j}/(2j(2j-1)) for the Stirling series, j = 1..8.
constexpr double kStirlingCoeff[] = {
    1.0 / 12.0,        -1.0 / 360.0,       1.0 / 1260.0,       -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0,  1.0 / 156.0,        -3617.0 / 122400.0,
};

// Stirling series correction sum_j c_j x^{1-2j}, accurate for x >= 15.
double stirling_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = 0.0;
  double p = inv;
  for (double c : kStirlingCoeff) {
    sum += c * p;
    p *= inv2;
  }
  return sum;
}

constexpr double kStirlingThreshold = 15.0;

// Eigenvalues (ascending) of a symmetric tridiagonal matrix together with the
// first component of each normalised eigenvector.
void tridiagonal_first_components(std::vector<double>& diag, std::vector<double> off, std::vector<double>& first);

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("matrix size mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix size mismatch");
  Matrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z_old = z;
      z = z_old - p1 / dp;
      if (std::abs(z - z_old) <= 1e-16) {
        // One more pass so dp belongs to the converged node.
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        dp = n * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = mid;
  return rule;
}

QuadratureRule gauss_jacobi(int order, double alpha, double beta_exp, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_jacobi: order must be >= 1");
  if (!(a < b)) throw std::invalid_argument("gauss_jacobi: need a < b");
  if (!(alpha > -1.0) || !(beta_exp > -1.0)) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
  // Jacobi matrix for (1 - s)^alpha (1 + s)^beta on (-1, 1).
  const int n = order;
  const double ab = alpha + beta_exp;
  std::vector<double> diag(n);
  std::vector<double> off(n > 1 ? n - 1 : 0);
  diag[0] = (beta_exp - alpha) / (ab + 2.0);
  for (int i = 1; i < n; ++i) {
    const double t = 2.0 * i + ab;
    diag[i] = (beta_exp * beta_exp - alpha * alpha) / (t * (t + 2.0));
  }
  for (int i = 1; i < n; ++i) {
    const double t = 2.0 * i + ab;
    const double num = 4.0 * i * (i + alpha) * (i + beta_exp) * (i + ab);
    const double den = t * t * (t + 1.0) * (t - 1.0);
    off[i - 1] = std::sqrt(num / den);
  }
  const double log_mu0 = (ab + 1.0) * std::log(2.0) + log_gamma(alpha + 1.0) + log_gamma(beta_exp + 1.0) -
                         log_gamma(ab + 2.0);
  std::vector<double> first;
  tridiagonal_first_components(diag, std::move(off), first);

  const double half = 0.5 * (b - a);
  const double scale = std::exp(log_mu0 + (ab + 1.0) * std::log(half));
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = diag[i];
    const double v0 = first[i];
    rule.nodes[i] = a + half * (1.0 + s);
    rule.weights[i] = scale * v0 * v0;
  }
  return rule;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
  if (std::isinf(x)) return x;
  double shift = 0.0;
  double y = x;
  if (y < kStirlingThreshold) {
    double prod = 1.0;
    while (y < kStirlingThreshold) {
      prod *= y;
      y += 1.0;
    }
    shift = std::log(prod);
  }
  const double half_log_two_pi = 0.5 * std::log(2.0 * kPi);
  return (y - 0.5) * std::log(y) - y + half_log_two_pi + stirling_tail(y) - shift;
}

double log_gamma_ratio(double x, double s) {
  if (!(x > 0.0) || !(x + s > 0.0)) throw std::domain_error("log_gamma_ratio: arguments must be positive");
  if (x < kStirlingThreshold || x + s < kStirlingThreshold) return log_gamma(x + s) - log_gamma(x);
  // (x+s-1/2) ln(x+s) - (x-1/2) ln x - s, rearranged to avoid cancellation.
  const double main = (x - 0.5) * std::log1p(s / x) + s * std::log(x + s) - s;
  return main + stirling_tail(x + s) - stirling_tail(x);
}

double log_beta(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw std::domain_error("beta: arguments must be positive");
  return log_gamma(p) + log_gamma(q) - log_gamma(p + q);
}

double beta(double p, double q) { return std::exp(log_beta(p, q)); }

double gegenbauer(int k, double alpha, double t) {
  if (k < 0) throw std::invalid_argument("gegenbauer: negative degree");
  if (std::abs(t) > 1.0) throw std::domain_error("gegenbauer: |t| > 1");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * alpha * t;
  for (int n = 2; n <= k; ++n) {
    const double next = (2.0 * t * (n + alpha - 1.0) * cur - (n + 2.0 * alpha - 2.0) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

double bessel_series(int k, double x) {
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  double term = std::exp(k * std::log(half) - log_gamma(k + 1.0));
  double sum = term;
  const double q = half * half;
  for (int m = 0; m < 500; ++m) {
    term *= -q / ((m + 1.0) * (m + k + 1.0));
    sum += term;
    if (m > half && std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's backward recurrence normalised by J_0 + 2 sum J_{2m} = 1.
double bessel_miller(int k, double x) {
  constexpr double kBig = 1e250;
  constexpr double kBigInv = 1e-250;
  const double top = std::max<double>(k, x);
  int start = static_cast<int>(top) + 20 + static_cast<int>(std::sqrt(160.0 * top));
  start += start % 2;
  const double tox = 2.0 / x;
  bool add = false;
  double bjp = 0.0;
  double bj = 1.0;
  double ans = 0.0;
  double sum = 0.0;
  for (int j = start; j > 0; --j) {
    const double bjm = j * tox * bj - bjp;
    bjp = bj;
    bj = bjm;
    if (std::abs(bj) > kBig) {
      bj *= kBigInv;
      bjp *= kBigInv;
      ans *= kBigInv;
      sum *= kBigInv;
    }
    if (add) sum += bj;
    add = !add;
    if (j == k) ans = bjp;
  }
  if (k == 0) ans = bj;
  sum = 2.0 * sum - bj;
  return ans / sum;
}

}  // namespace

double bessel_j(int k, double x) {
  if (k < 0) throw std::invalid_argument("bessel_j: negative order");
  if (x < 0.0) throw std::domain_error("bessel_j: negative argument");
  if (x <= 12.0) return bessel_series(k, x);
  return bessel_miller(k, x);
}

namespace {

double bisect_zero(int k, double lo, double hi, double f_lo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = bessel_j(k, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Scans J_k on a uniform grid (zero spacing of J_k always exceeds 2.9) and
// refines each sign change by bisection. Stops after `max_count` zeros or
// when x passes x_max.
std::vector<double> scan_zeros(int k, double x_max, int max_count) {
  std::vector<double> zeros;
  constexpr double kStep = 0.2;
  double x = (k == 0) ? 1.0 : static_cast<double>(k);
  double f = bessel_j(k, x);
  while (static_cast<int>(zeros.size()) < max_count && x < x_max) {
    const double x_next = x + kStep;
    const double f_next = bessel_j(k, x_next);
    if (f_next == 0.0) {
      zeros.push_back(x_next);
      x = x_next + 1e-9;
      f = bessel_j(k, x);
      continue;
    }
    if ((f > 0.0) != (f_next > 0.0)) zeros.push_back(bisect_zero(k, x, x_next, f));
    x = x_next;
    f = f_next;
  }
  while (!zeros.empty() && zeros.back() >= x_max) zeros.pop_back();
  return zeros;
}

}  // namespace

double bessel_j_zero(int k, int m) {
  if (k < 0) throw std::invalid_argument("bessel_j_zero: negative order");
  if (m < 1) throw std::invalid_argument("bessel_j_zero: m must be >= 1");
  auto zeros = scan_zeros(k, std::numeric_limits<double>::infinity(), m);
  return zeros.back();
}

std::vector<double> bessel_j_zeros_below(int k, double x_max) {
  if (k < 0) throw std::invalid_argument("bessel_j_zeros_below: negative order");
  return scan_zeros(k, x_max, std::numeric_limits<int>::max());
}

namespace {

// Householder reduction to tridiagonal form (after the EISPACK tred2
// routine). On exit v holds the accumulated transformation.
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);
  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL with Wilkinson-type shifts (after EISPACK tql2). `e` holds the
// sub-diagonal in e[1..n-1]. When `v` is null only eigenvalues are formed.
void implicit_ql(std::vector<double>& d, std::vector<double>& e, Matrix* v) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 300) throw std::runtime_error("symmetric_eigen: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (v != nullptr) {
            for (std::size_t k = 0; k < v->rows(); ++k) {
              h = (*v)(k, ii + 1);
              (*v)(k, ii + 1) = s * (*v)(k, ii) + c * h;
              (*v)(k, ii) = c * (*v)(k, ii) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

void check_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("symmetric_eigen: matrix is not square");
  if (a.rows() == 0) throw std::invalid_argument("symmetric_eigen: empty matrix");
  const double scale = a.max_abs();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10 * scale)
        throw std::invalid_argument("symmetric_eigen: matrix is not symmetric");
}

EigenSystem sorted(std::vector<double> d, Matrix v, bool with_vectors) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  EigenSystem out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = d[order[i]];
  if (with_vectors) {
    out.vectors = Matrix(v.rows(), n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < v.rows(); ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

void tridiagonal_first_components(std::vector<double>& diag, std::vector<double> off, std::vector<double>& first) {
  const std::size_t n = diag.size();
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = off[i - 1];
  // Rotations act on columns, so tracking the first row of the accumulated
  // eigenvector matrix costs O(n) per sweep instead of O(n^2).
  Matrix row(1, n);
  row(0, 0) = 1.0;
  implicit_ql(diag, e, &row);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return diag[i] < diag[j]; });
  std::vector<double> sorted_diag(n);
  first.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sorted_diag[i] = diag[order[i]];
    first[i] = row(0, order[i]);
  }
  diag = std::move(sorted_diag);
}

}  // namespace

std::vector<double> symmetric_eigen(const Matrix& a) {
  check_symmetric(a);
  const std::size_t n = a.rows();
  Matrix v = a;
  std::vector<double> d(n), e(n);
  tridiagonalize(v, d, e);
  implicit_ql(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

EigenSystem symmetric_eigensystem(const Matrix& a) {
  check_symmetric(a);
  const std::size_t n = a.rows();
  Matrix v = a;
  std::vector<double> d(n), e(n);
  tridiagonalize(v, d, e);
  implicit_ql(d, e, &v);
  return sorted(std::move(d), std::move(v), true);
}

EigenSystem tridiagonal_eigensystem(std::vector<double> diag, std::vector<double> off) {
  const std::size_t n = diag.size();
  if (n == 0) throw std::invalid_argument("tridiagonal_eigensystem: empty");
  if (off.size() + 1 != n) throw std::invalid_argument("tridiagonal_eigensystem: size mismatch");
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = off[i - 1];
  Matrix v = Matrix::identity(n);
  implicit_ql(diag, e, &v);
  return sorted(std::move(diag), std::move(v), true);
}

std::vector<double> least_squares(const Matrix& design, std::span<const double> rhs) {
  const std::size_t m = design.rows();
  const std::size_t p = design.cols();
  if (rhs.size() != m) throw std::invalid_argument("least_squares: size mismatch");
  if (m < p || p == 0) throw std::invalid_argument("least_squares: need rows >= cols > 0");
  Matrix r = design;
  std::vector<double> y(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm = std::hypot(norm, r(i, k));
    if (norm == 0.0) throw std::invalid_argument("least_squares: rank-deficient design");
    const double alpha = r(k, k) > 0 ? -norm : norm;
    std::vector<double> u(m - k);
    for (std::size_t i = k; i < m; ++i) u[i - k] = r(i, k);
    u[0] -= alpha;
    double unorm2 = 0.0;
    for (double x : u) unorm2 += x * x;
    if (unorm2 == 0.0) continue;
    for (std::size_t j = k; j < p; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += u[i - k] * r(i, j);
      const double f = 2.0 * dot / unorm2;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= f * u[i - k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < m; ++i) dot += u[i - k] * y[i];
    const double f = 2.0 * dot / unorm2;
    for (std::size_t i = k; i < m; ++i) y[i] -= f * u[i - k];
  }
  std::vector<double> x(p);
  for (std::size_t kk = p; kk-- > 0;) {
    double s = y[kk];
    for (std::size_t j = kk + 1; j < p; ++j) s -= r(kk, j) * x[j];
    x[kk] = s / r(kk, kk);
  }
  return x;
}

}  // namespace harmotop
