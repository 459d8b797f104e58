#include "harmotop/harmonic_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "harmotop/numerics.hpp"

namespace harmotop {

namespace {

constexpr double kPi = std::numbers::pi;

Count checked_mul(Count a, Count b) {
  Count out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("multiplicity: 128-bit overflow");
  return out;
}

Count checked_add(Count a, Count b) {
  Count out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("multiplicity: 128-bit overflow");
  return out;
}

double norm(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return std::sqrt(s);
}

void require_low_dimension(int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("pointwise harmonics are implemented for d = 2 and d = 3 only");
}

void require_unit(std::span<const double> point, int d) {
  if (static_cast<int>(point.size()) != d) throw std::invalid_argument("point has the wrong number of coordinates");
  if (std::abs(norm(point) - 1.0) > 1e-12) throw std::invalid_argument("spherical_harmonic: point is not on the unit sphere");
}

// Fully normalised associated Legendre functions Q[m][k], 0 <= m <= k <= K,
// scaled so that 2 pi int_{-1}^{1} Q_k^m(t)^2 dt = 1.
std::vector<std::vector<double>> normalised_legendre(int K, double t) {
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  std::vector<std::vector<double>> q(K + 1);
  double diag = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= K; ++m) {
    if (m > 0) diag *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    auto& col = q[m];
    col.assign(K + 1, 0.0);
    col[m] = diag;
    if (m + 1 <= K) col[m + 1] = std::sqrt(2.0 * m + 3.0) * t * diag;
    for (int k = m + 2; k <= K; ++k) {
      const double a_k = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - static_cast<double>(m) * m));
      const double a_km1 = std::sqrt((4.0 * (k - 1.0) * (k - 1.0) - 1.0) /
                                     ((k - 1.0) * (k - 1.0) - static_cast<double>(m) * m));
      col[k] = a_k * (t * col[k - 1] - col[k - 2] / a_km1);
    }
  }
  return q;
}

}  // namespace

void require_dimension(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2, got " + std::to_string(d));
}

Count binomial(long long m, long long n) {
  if (n < 0 || m < n) return 0;
  n = std::min(n, m - n);
  Count result = 1;
  for (long long i = 1; i <= n; ++i) {
    // result * (m - n + i) is divisible by i at every step.
    result = checked_mul(result, static_cast<Count>(m - n + i)) / i;
  }
  return result;
}

Count multiplicity(int d, long long k) {
  require_dimension(d);
  if (k < 0) throw std::invalid_argument("multiplicity: negative degree");
  return binomial(d + k - 1, d - 1) - binomial(d + k - 3, d - 1);
}

Count cumulative_multiplicity(int d, long long k) {
  require_dimension(d);
  if (k < -1) throw std::invalid_argument("cumulative_multiplicity: degree below -1");
  if (k == -1) return 0;
  return checked_add(binomial(d + k - 1, d - 1), binomial(d + k - 2, d - 1));
}

double multiplicity_asymptotic_check(int d, long long k_max) {
  require_dimension(d);
  if (k_max < 10) throw std::invalid_argument("multiplicity_asymptotic_check: k_max must be >= 10");
  Count factorial = 1;
  for (int i = 2; i <= d - 1; ++i) factorial *= i;
  double worst = 0.0;
  for (long long k = k_max / 2; k <= k_max; ++k) {
    Count power = 1;
    for (int i = 0; i < d - 1; ++i) power = checked_mul(power, k);
    // Exact integer numerator M_k (d-1)! - 2 k^{d-1}.
    const Count num = checked_mul(cumulative_multiplicity(d, k), factorial) - checked_mul(power, 2);
    const double dev = std::abs(to_double(num) / (2.0 * to_double(power))) * static_cast<double>(k);
    worst = std::max(worst, dev);
  }
  return worst;
}

double sphere_surface_area(int d) {
  require_dimension(d);
  return 2.0 * std::exp(0.5 * d * std::log(kPi) - log_gamma(0.5 * d));
}

std::size_t flat_index(int d, BasisIndex idx) {
  if (idx.k < 0 || idx.l < 1 || idx.l > multiplicity(d, idx.k))
    throw std::invalid_argument("basis index out of range");
  return static_cast<std::size_t>(cumulative_multiplicity(d, idx.k - 1)) + idx.l - 1;
}

BasisIndex basis_index(int d, std::size_t flat) {
  require_dimension(d);
  int k = 0;
  while (static_cast<std::size_t>(cumulative_multiplicity(d, k)) <= flat) ++k;
  return {k, static_cast<int>(flat - static_cast<std::size_t>(cumulative_multiplicity(d, k - 1))) + 1};
}

double spherical_harmonic(int d, BasisIndex idx, std::span<const double> point) {
  require_low_dimension(d);
  require_unit(point, d);
  if (idx.k < 0 || idx.l < 1 || idx.l > multiplicity(d, idx.k)) throw std::invalid_argument("basis index out of range");
  const int k = idx.k;
  if (d == 2) {
    const double theta = std::atan2(point[1], point[0]);
    if (k == 0) return 1.0 / std::sqrt(2.0 * kPi);
    return (idx.l == 1 ? std::cos(k * theta) : std::sin(k * theta)) / std::sqrt(kPi);
  }
  const double t = std::clamp(point[2], -1.0, 1.0);
  const double phi = std::atan2(point[1], point[0]);
  const auto q = normalised_legendre(k, t);
  if (idx.l == 1) return q[0][k];
  const int m = idx.l / 2;
  const double trig = (idx.l % 2 == 0) ? std::cos(m * phi) : std::sin(m * phi);
  return std::sqrt(2.0) * q[m][k] * trig;
}

std::vector<double> harmonics_upto(int d, int K, std::span<const double> point) {
  require_low_dimension(d);
  require_unit(point, d);
  if (K < 0) throw std::invalid_argument("harmonics_upto: negative degree");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(cumulative_multiplicity(d, K)));
  const double phi = std::atan2(point[1], point[0]);
  if (d == 2) {
    out.push_back(1.0 / std::sqrt(2.0 * kPi));
    const double inv = 1.0 / std::sqrt(kPi);
    for (int k = 1; k <= K; ++k) {
      out.push_back(std::cos(k * phi) * inv);
      out.push_back(std::sin(k * phi) * inv);
    }
    return out;
  }
  const double t = std::clamp(point[2], -1.0, 1.0);
  const auto q = normalised_legendre(K, t);
  std::vector<double> cosm(K + 1), sinm(K + 1);
  for (int m = 0; m <= K; ++m) {
    cosm[m] = std::sqrt(2.0) * std::cos(m * phi);
    sinm[m] = std::sqrt(2.0) * std::sin(m * phi);
  }
  for (int k = 0; k <= K; ++k) {
    out.push_back(q[0][k]);
    for (int m = 1; m <= k; ++m) {
      out.push_back(q[m][k] * cosm[m]);
      out.push_back(q[m][k] * sinm[m]);
    }
  }
  return out;
}

std::vector<double> zonal_sums_upto(int d, int K, double t) {
  require_dimension(d);
  if (std::abs(t) > 1.0) throw std::domain_error("zonal_sum: |t| > 1");
  if (K < 0) throw std::invalid_argument("zonal_sum: negative degree");
  std::vector<double> out(K + 1);
  const double area = sphere_surface_area(d);
  if (d == 2) {
    // Chebyshev recurrence for cos(k theta), t = cos theta.
    double prev = 1.0;
    double cur = t;
    out[0] = 1.0 / (2.0 * kPi);
    for (int k = 1; k <= K; ++k) {
      out[k] = cur / kPi;
      const double next = 2.0 * t * cur - prev;
      prev = cur;
      cur = next;
    }
    return out;
  }
  const double alpha = 0.5 * d - 1.0;
  // Ratio C_k(t)/C_k(1) carried directly: both satisfy the same recurrence.
  double p_prev = 1.0, p_cur = 2.0 * alpha * t;
  double one_prev = 1.0, one_cur = 2.0 * alpha;
  out[0] = 1.0 / area;
  for (int k = 1; k <= K; ++k) {
    out[k] = to_double(multiplicity(d, k)) / area * (p_cur / one_cur);
    const double a = 2.0 * (k + alpha) / (k + 1.0);
    const double b = (k + 2.0 * alpha - 1.0) / (k + 1.0);
    const double p_next = a * t * p_cur - b * p_prev;
    const double one_next = a * one_cur - b * one_prev;
    // Rescale both sequences together to keep them O(1).
    const double scale = 1.0 / one_next;
    p_prev = p_cur * scale;
    p_cur = p_next * scale;
    one_prev = one_cur * scale;
    one_cur = 1.0;
  }
  return out;
}

double zonal_sum(int d, int k, double t) {
  if (k < 0) throw std::invalid_argument("zonal_sum: negative degree");
  return zonal_sums_upto(d, k, t)[k];
}

double basis_value(int d, BasisIndex idx, std::span<const double> x) {
  require_low_dimension(d);
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("point has the wrong number of coordinates");
  const double r = norm(x);
  if (r >= 1.0) throw std::domain_error("basis_value: point outside the open unit ball");
  if (idx.k < 0 || idx.l < 1 || idx.l > multiplicity(d, idx.k)) throw std::invalid_argument("basis index out of range");
  if (r == 0.0) return idx.k == 0 ? std::sqrt(static_cast<double>(d)) / std::sqrt(sphere_surface_area(d)) : 0.0;
  std::vector<double> unit(x.begin(), x.end());
  for (double& v : unit) v /= r;
  return std::sqrt(2.0 * idx.k + d) * std::pow(r, idx.k) * spherical_harmonic(d, idx, unit);
}

std::vector<double> basis_values_upto(int d, int K, std::span<const double> x) {
  require_low_dimension(d);
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("point has the wrong number of coordinates");
  const double r = norm(x);
  if (r >= 1.0) throw std::domain_error("basis_values_upto: point outside the open unit ball");
  const std::size_t n = static_cast<std::size_t>(cumulative_multiplicity(d, K));
  if (r == 0.0) {
    std::vector<double> out(n, 0.0);
    out[0] = std::sqrt(static_cast<double>(d)) / std::sqrt(sphere_surface_area(d));
    return out;
  }
  std::vector<double> unit(x.begin(), x.end());
  for (double& v : unit) v /= r;
  std::vector<double> out = harmonics_upto(d, K, unit);
  std::size_t pos = 0;
  double rk = 1.0;
  for (int k = 0; k <= K; ++k) {
    const double f = std::sqrt(2.0 * k + d) * rk;
    const auto mk = static_cast<std::size_t>(multiplicity(d, k));
    for (std::size_t l = 0; l < mk; ++l) out[pos++] *= f;
    rk *= r;
  }
  return out;
}

}  // namespace harmotop
