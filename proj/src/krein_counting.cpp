#include "harmotop/krein_counting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harmotop/numerics.hpp"
#include "harmotop/radial_toeplitz.hpp"

namespace harmotop {

namespace {

void validate(const SandwichInput& in) {
  if (!(in.lambda > 0.0) || !std::isfinite(in.lambda)) throw std::invalid_argument("sandwich: lambda must be positive");
  if (!(in.eps > 0.0 && in.eps < 1.0)) throw std::invalid_argument("sandwich: eps must lie in (0, 1)");
  if (!in.n_plus || !in.remainder) throw std::invalid_argument("sandwich: counting and remainder functions are required");
  if (in.offset < 0) throw std::invalid_argument("sandwich: offset must be nonnegative");
}

}  // namespace

BoundInterval sandwich_minus(const SandwichInput& in) {
  validate(in);
  return {in.n_plus(in.lambda), in.n_plus((1.0 - in.eps) * in.lambda) + in.remainder(in.eps)};
}

BoundInterval sandwich_plus(const SandwichInput& in) {
  validate(in);
  const Count low = in.n_plus((1.0 + in.eps) * in.lambda) - in.remainder(in.eps) - in.offset;
  const Count high = in.n_plus(in.lambda) - in.offset;
  return {std::max<Count>(0, low), std::max<Count>(0, high)};
}

double envelope_kappa(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  return d <= 4 ? d / (d + 2.0) : (d - 2.0) / (d - 1.0);
}

double optimal_theta(int d, double gamma) {
  if (d < 2 || !(gamma > 0.0)) throw std::invalid_argument("optimal_theta: need d >= 2 and gamma > 0");
  return 2.0 * (d - 1.0) / (gamma * (d + 2.0));
}

Envelope corollary_f3_envelope(int d, double gamma, double a, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("envelope: lambda must be positive");
  Envelope e;
  e.main_exponent = (d - 1.0) / gamma;
  e.lower_order_exponent = (d - 2.0) / gamma;
  e.kappa = envelope_kappa(d);
  e.kappa_exponent = (d - 1.0) * e.kappa / gamma;
  e.main = theorem1_constant(d, gamma, a) * std::exp(-e.main_exponent * std::log(lambda));
  return e;
}

std::vector<BucklingValue> buckling_disk_below(double E) {
  std::vector<BucklingValue> out;
  if (!(E > 0.0)) return out;
  const double x_max = std::sqrt(E);
  // j_{nu,1} > nu, so orders beyond sqrt(E) contribute nothing.
  for (int k = 0; k + 1 < x_max; ++k) {
    const auto zeros = bessel_j_zeros_below(k + 1, x_max);
    if (zeros.empty()) break;
    for (double z : zeros)
      if (z * z < E) out.push_back({z * z, k == 0 ? 1 : 2});
  }
  std::sort(out.begin(), out.end(), [](const BucklingValue& a, const BucklingValue& b) { return a.value < b.value; });
  return out;
}

std::vector<BucklingValue> buckling_disk(int n) {
  if (n < 1) throw std::invalid_argument("buckling_disk: n must be >= 1");
  double E = 64.0;
  for (;;) {
    auto values = buckling_disk_below(E);
    if (static_cast<int>(values.size()) >= n) {
      values.resize(static_cast<std::size_t>(n));
      return values;
    }
    E *= 2.0;
  }
}

Count buckling_count(double E) {
  Count n = 0;
  for (const auto& b : buckling_disk_below(E)) n += b.multiplicity;
  return n;
}

WeylFit weyl_L_check(std::span<const double> energies) {
  if (energies.size() < 4) throw std::invalid_argument("weyl_L_check: need at least 4 energies");
  for (std::size_t i = 1; i < energies.size(); ++i)
    if (!(energies[i] > energies[i - 1])) throw std::invalid_argument("weyl_L_check: energies must increase");
  WeylFit out;
  out.energies.assign(energies.begin(), energies.end());
  // One enumeration at the top energy serves the whole grid.
  const auto values = buckling_disk_below(energies.back());
  for (double E : energies) {
    Count n = 0;
    for (const auto& b : values)
      if (b.value < E) n += b.multiplicity;
    out.counts.push_back(n);
  }
  const FitResult fit = fit_counts(out.energies, out.counts, 1.0, 0.5);
  out.exponent = fit.exponent;
  out.coefficient = fit.coefficient;
  out.point_ratio = fit.point_ratio;
  return out;
}

Count remainder_model(double eps, double v_sup, double lambda1, int d) {
  if (!(eps > 0.0)) throw std::invalid_argument("remainder_model: eps must be positive");
  if (!(v_sup >= 0.0) || !(lambda1 >= 0.0)) throw std::invalid_argument("remainder_model: v_sup and lambda1 must be nonnegative");
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  const double E = lambda1 + v_sup / eps;
  if (d == 2) return buckling_count(E);
  return static_cast<Count>(std::floor(std::pow(E, d / 2.0)));
}

}  // namespace harmotop
