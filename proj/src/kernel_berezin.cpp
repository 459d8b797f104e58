#include "harmotop/kernel_berezin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmotop/errors.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/radial_toeplitz.hpp"

namespace harmotop {

namespace {

double norm_inside(std::span<const double> x, int d) {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("point has " + std::to_string(x.size()) + " coordinates, expected " +
                                std::to_string(d));
  double s = 0.0;
  for (double c : x) s += c * c;
  const double r = std::sqrt(s);
  if (!(r < 1.0)) throw std::domain_error("point lies outside the open unit ball");
  return r;
}

// Cosine of the angle between x and y; any value works when either is 0.
double direction_cosine(std::span<const double> x, std::span<const double> y, double rx, double ry) {
  if (rx == 0.0 || ry == 0.0) return 1.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return std::clamp(dot / (rx * ry), -1.0, 1.0);
}

double kernel_from(int d, int K, double rx, double ry, double t) {
  const auto zonal = zonal_sums_upto(d, K, t);
  double sum = 0.0;
  double radial = 1.0;
  for (int k = 0; k <= K; ++k) {
    sum += (2.0 * k + d) * radial * zonal[k];
    radial *= rx * ry;
  }
  return sum;
}

double radial_density(int d, double r, int K) {
  const double r2 = r * r;
  double sum = 0.0;
  double radial = 1.0;
  for (int k = 0; k <= K; ++k) {
    sum += (2.0 * k + d) * to_double(multiplicity(d, k)) * radial;
    radial *= r2;
  }
  return sum / sphere_surface_area(d);
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max({std::abs(a), std::abs(b), 1e-300}); }

TruncationSpec refined(const TruncationSpec& s) { return {s.K, s.n_r + 8, s.n_ang + 4}; }

double rho_on_grid(const GeneralSymbol& V, int d, const TruncationSpec& spec) {
  const TensorGrid grid = TensorGrid::for_symbol(V, d, spec);
  const auto values = grid.sample(V);
  double total = 0.0;
  for (std::size_t i_r = 0; i_r < grid.radial_size(); ++i_r) {
    const double r = grid.radius(i_r);
    const double rho = radial_density(d, r, spec.K);
    double shell = 0.0;
    for (std::size_t i_a = 0; i_a < grid.angular_size(); ++i_a)
      shell += grid.angular_weight(i_a) * values[i_r * grid.angular_size() + i_a];
    total += grid.radial_weight(i_r) * rho * shell;
  }
  return total;
}

double berezin_on_grid(const GeneralSymbol& V, int d, std::span<const double> x, double rx, const TruncationSpec& spec) {
  const TensorGrid grid = TensorGrid::for_symbol(V, d, spec);
  const auto values = grid.sample(V);
  double total = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (values[n] == 0.0) continue;
    const std::size_t i_r = n / grid.angular_size();
    const double ry = grid.radius(i_r);
    const auto dir = grid.direction(n % grid.angular_size());
    double dot = 0.0;
    for (int c = 0; c < d; ++c) dot += x[c] * dir[c];
    const double t = rx > 0.0 ? std::clamp(dot / rx, -1.0, 1.0) : 1.0;
    const double kern = kernel_from(d, spec.K, rx, ry, t);
    total += grid.weight(n) * kern * kern * values[n];
  }
  return total / density_rho(d, x, spec.K);
}

}  // namespace

double reproducing_kernel(int d, std::span<const double> x, std::span<const double> y, int K) {
  require_dimension(d);
  if (K < 0) throw std::invalid_argument("kernel truncation K must be >= 0");
  const double rx = norm_inside(x, d);
  const double ry = norm_inside(y, d);
  return kernel_from(d, K, rx, ry, direction_cosine(x, y, rx, ry));
}

double density_rho(int d, std::span<const double> x, int K) {
  require_dimension(d);
  if (K < 0) throw std::invalid_argument("kernel truncation K must be >= 0");
  return radial_density(d, norm_inside(x, d), K);
}

double boundary_distance(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return 1.0 - std::sqrt(s);
}

double separation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("separation: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s) + boundary_distance(x) + boundary_distance(y);
}

double rho_integral(const GeneralSymbol& V, int d, const TruncationSpec& spec) {
  spec.validate(d);
  const double base = rho_on_grid(V, d, spec);
  if (!V.node_values) {
    const double fine = rho_on_grid(V, d, refined(spec));
    if (!close(base, fine))
      throw QuadratureDivergence("rho_integral: refined quadrature changed the value from " + std::to_string(base) +
                                 " to " + std::to_string(fine));
  }
  return base;
}

double rho_integral(const RadialSymbol& v, int d, int K) {
  if (K < 0) throw std::invalid_argument("kernel truncation K must be >= 0");
  double sum = 0.0;
  for (int k = 0; k <= K; ++k) sum += to_double(multiplicity(d, k)) * log_mu(v, d, k).value();
  return sum;
}

double berezin_transform(const GeneralSymbol& V, int d, std::span<const double> x, const TruncationSpec& spec) {
  spec.validate(d);
  const double rx = norm_inside(x, d);
  const double base = berezin_on_grid(V, d, x, rx, spec);
  if (!V.node_values) {
    const double fine = berezin_on_grid(V, d, x, rx, refined(spec));
    if (!close(base, fine))
      throw QuadratureDivergence("berezin_transform: refined quadrature changed the value from " +
                                 std::to_string(base) + " to " + std::to_string(fine));
  }
  return base;
}

double berezin_transform(const RadialSymbol& v, int d, std::span<const double> x, int K) {
  require_dimension(d);
  if (K < 0) throw std::invalid_argument("kernel truncation K must be >= 0");
  const double r2 = std::pow(norm_inside(x, d), 2);
  double num = 0.0, den = 0.0, radial = 1.0;
  for (int k = 0; k <= K; ++k) {
    const double w = (2.0 * k + d) * to_double(multiplicity(d, k)) * radial;
    num += w * log_mu(v, d, k).value();
    den += w;
    radial *= r2;
  }
  return num / den;
}

int suggest_truncation(double max_radius) {
  if (!(max_radius >= 0.0 && max_radius < 1.0)) throw std::domain_error("suggest_truncation: radius must lie in [0, 1)");
  return static_cast<int>(std::ceil(40.0 / (1.0 - max_radius) - 1e-9));
}

}  // namespace harmotop
