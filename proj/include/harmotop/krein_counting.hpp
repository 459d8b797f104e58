#pragma once

#include <functional>
#include <span>
#include <vector>

#include "harmotop/count.hpp"

namespace harmotop {

struct SandwichInput {
  double lambda = 0.0;
  double eps = 0.5;
  /// lambda -> n_+(lambda; T_V), nonincreasing.
  std::function<Count(double)> n_plus;
  /// eps -> bound on the resolvent remainder count.
  std::function<Count(double)> remainder;
  /// Integer offset of the lower-side estimate.
  Count offset = 0;
};

struct BoundInterval {
  Count lower = 0;
  Count upper = 0;
  bool well_formed() const { return lower <= upper; }
};

/// [n(lambda), n((1 - eps) lambda) + remainder(eps)].
BoundInterval sandwich_minus(const SandwichInput& in);
/// [max(0, n((1 + eps) lambda) - remainder(eps) - C), max(0, n(lambda) - C)].
BoundInterval sandwich_plus(const SandwichInput& in);

/// Real-valued main term and error exponents of the perturbed counting law.
struct Envelope {
  double main = 0.0;  // C lambda^{-(d-1)/gamma}
  double main_exponent = 0.0;
  double lower_order_exponent = 0.0;  // (d-2)/gamma
  double kappa = 0.0;
  double kappa_exponent = 0.0;  // (d-1) kappa / gamma
};

/// kappa = d/(d+2) for 2 <= d <= 4 and (d-2)/(d-1) for d >= 4.
double envelope_kappa(int d);
/// eps = lambda^theta balancing the two remainder terms: 2(d-1)/(gamma(d+2)).
double optimal_theta(int d, double gamma);
Envelope corollary_f3_envelope(int d, double gamma, double a, double lambda);

struct BucklingValue {
  double value = 0.0;
  int multiplicity = 1;
};

/// The n smallest distinct values j_{k+1,m}^2 on the unit disk (multiplicity
/// 1 for k = 0, 2 otherwise), ascending.
std::vector<BucklingValue> buckling_disk(int n);
/// All values strictly below E.
std::vector<BucklingValue> buckling_disk_below(double E);
/// Number of values strictly below E, with multiplicity.
Count buckling_count(double E);

struct WeylFit {
  double exponent = 0.0;
  double coefficient = 0.0;
  double point_ratio = 0.0;  // N(E)/E at the largest E
  std::vector<double> energies;
  std::vector<Count> counts;
};

/// Fits buckling counts on an increasing grid (at least 4 energies) against
/// C E + B E^{1/2}, plus a free log-log slope.
WeylFit weyl_L_check(std::span<const double> energies);

/// Count of L-eigenvalues below E = lambda1 + v_sup / eps: the disk spectrum
/// for d = 2, the model floor(E^{d/2}) otherwise.
Count remainder_model(double eps, double v_sup, double lambda1, int d);

}  // namespace harmotop
