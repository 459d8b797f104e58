#include "harmotop/boundary_reduction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "harmotop/galerkin_toeplitz.hpp"
#include "harmotop/radial_toeplitz.hpp"

namespace harmotop {

double harmonic_extension_profile(int k, double r) {
  if (k < 0) throw std::invalid_argument("degree k must be nonnegative");
  return k == 0 ? 1.0 : std::pow(r, k);
}

double harmonic_extension(int d, BasisIndex idx, std::span<const double> x) {
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("point dimension does not match d");
  double s = 0.0;
  for (double c : x) s += c * c;
  const double r = std::sqrt(s);
  std::vector<double> dir(d, 0.0);
  if (r == 0.0) {
    if (idx.k > 0) return 0.0;
    dir[0] = 1.0;
  } else {
    for (int c = 0; c < d; ++c) dir[c] = x[c] / r;
  }
  return harmonic_extension_profile(idx.k, r) * spherical_harmonic(d, idx, dir);
}

double j_eigenvalue(int d, long long k) {
  require_dimension(d);
  if (k < 0) throw std::invalid_argument("degree k must be nonnegative");
  return 1.0 / (2.0 * static_cast<double>(k) + d);
}

double dtn_eigenvalue(int d, long long k) {
  require_dimension(d);
  if (k < 0) throw std::invalid_argument("degree k must be nonnegative");
  return static_cast<double>(k);
}

Matrix BoundaryOperator::to_matrix() const {
  if (const auto* dense = std::get_if<DenseBoundary>(&data)) return dense->matrix;
  const auto& diag = std::get<DiagonalBoundary>(data).per_degree;
  const std::size_t n = static_cast<std::size_t>(cumulative_multiplicity(d, K));
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = diag[basis_index(d, i).k];
  return m;
}

BoundaryOperator assemble_JV(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads) {
  BoundaryOperator out;
  out.d = d;
  out.K = spec.K;
  out.data = DenseBoundary{assemble_with_radial_factor(
      V, d, spec, [](int k, double r) { return harmonic_extension_profile(k, r); }, threads)};
  return out;
}

BoundaryOperator assemble_JV(const RadialSymbol& v, int d, int K) {
  if (K < 0) throw std::invalid_argument("truncation degree K must be >= 0");
  BoundaryOperator out;
  out.d = d;
  out.K = K;
  DiagonalBoundary diag;
  for (int k = 0; k <= K; ++k) diag.per_degree.push_back(log_mu(v, d, k).value() * j_eigenvalue(d, k));
  out.data = std::move(diag);
  return out;
}

BoundaryOperator reduced_operator(const BoundaryOperator& jv) {
  BoundaryOperator out = jv;
  if (auto* diag = std::get_if<DiagonalBoundary>(&out.data)) {
    for (std::size_t k = 0; k < diag->per_degree.size(); ++k) diag->per_degree[k] /= j_eigenvalue(jv.d, static_cast<long long>(k));
    return out;
  }
  Matrix& m = std::get<DenseBoundary>(out.data).matrix;
  std::vector<double> inv_sqrt(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(j_eigenvalue(jv.d, basis_index(jv.d, i).k));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  return out;
}

BoundaryOperator reduced_operator(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads) {
  return reduced_operator(assemble_JV(V, d, spec, threads));
}

std::vector<double> projection_coefficients(const std::function<double(std::span<const double>)>& u, int d,
                                            const TruncationSpec& spec) {
  spec.validate(d);
  const TensorGrid grid(d, spec);
  const std::size_t n = static_cast<std::size_t>(cumulative_multiplicity(d, spec.K));
  std::vector<double> coeff(n, 0.0);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const auto x = grid.point(node);
    const double r = grid.radius(node / grid.angular_size());
    const auto h = harmonics_upto(d, spec.K, grid.direction(node % grid.angular_size()));
    const double wu = grid.weight(node) * u(x);
    for (std::size_t i = 0; i < n; ++i) coeff[i] += wu * harmonic_extension_profile(basis_index(d, i).k, r) * h[i];
  }
  // Apply D^{-1}.
  for (std::size_t i = 0; i < n; ++i) coeff[i] /= j_eigenvalue(d, basis_index(d, i).k);
  return coeff;
}

double evaluate_extension(int d, std::span<const double> coefficients, std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    if (coefficients[i] != 0.0) sum += coefficients[i] * harmonic_extension(d, basis_index(d, i), x);
  return sum;
}

double SymbolOrderResult::error() const { return std::abs(estimate - expected); }

SymbolOrderResult symbol_order_check(double gamma, double a, int d, long long k_max) {
  if (!(gamma > 0.0) || !(a > 0.0)) throw std::invalid_argument("symbol order: a and gamma must be positive");
  if (k_max < 16) throw std::invalid_argument("symbol order: k_max must be >= 16");
  auto scaled = [&](long long k) {
    const SignedLog m = log_mu(RadialSymbol::power(a, gamma), d, k);
    return std::exp(gamma * std::log(static_cast<double>(k)) + m.log_abs);
  };
  const long long k1 = k_max / 4, k2 = k_max / 2, k3 = k_max;
  // Fit f(k) = L + c1/k + c2/k^2 through three points.
  Matrix design(3, 3);
  std::vector<double> rhs;
  long long ks[3] = {k1, k2, k3};
  for (int i = 0; i < 3; ++i) {
    const double h = 1.0 / static_cast<double>(ks[i]);
    design(i, 0) = 1.0;
    design(i, 1) = h;
    design(i, 2) = h * h;
    rhs.push_back(scaled(ks[i]));
  }
  SymbolOrderResult out;
  out.estimate = least_squares(design, rhs)[0];
  out.raw = rhs[2];
  out.expected = std::exp(-gamma * std::log(2.0) + log_gamma(gamma + 1.0)) * a;
  return out;
}

HormanderResult hormander_counting_check(double gamma, double a, int d, std::span<const double> energies) {
  if (energies.size() < 4) throw std::invalid_argument("hormander check: need at least 4 energies");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!(energies[i] > 0.0)) throw std::invalid_argument("hormander check: energies must be positive");
    if (i && !(energies[i] > energies[i - 1])) throw std::invalid_argument("hormander check: energies must increase");
  }
  const auto v = RadialSymbol::power(a, gamma);
  // mu_k^{-1/gamma} < E  <=>  mu_k > E^{-gamma}.
  std::vector<double> log_lambda;
  for (double e : energies) log_lambda.push_back(-gamma * std::log(e));
  HormanderResult out;
  out.energies.assign(energies.begin(), energies.end());
  out.counts = counting_many(v, d, log_lambda, Sign::plus);
  const FitResult fit = fit_counts(out.energies, out.counts, d - 1.0, 1.0);
  out.coefficient = fit.coefficient;
  out.point_ratio = fit.point_ratio;
  out.expected = theorem1_constant(d, gamma, a);
  return out;
}

}  // namespace harmotop
