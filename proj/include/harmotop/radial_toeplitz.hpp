#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "harmotop/count.hpp"
#include "harmotop/symbols.hpp"

namespace harmotop {

enum class Sign { plus, minus };

/// A positive threshold stored by its logarithm, so values far below the
/// smallest double stay representable.
class Threshold {
 public:
  static Threshold from_value(double lambda);
  static Threshold from_log(double log_lambda);
  double log() const { return log_; }
  /// ln lambda in extended precision, used to settle near ties.
  long double log_extended() const { return extended_; }
  double value() const;

 private:
  Threshold(double log_lambda, long double extended) : log_(log_lambda), extended_(extended) {}
  double log_;
  long double extended_;
};

/// value = sign * exp(log_abs); sign is 0 for an exact zero.
struct SignedLog {
  int sign = 0;
  double log_abs = 0.0;
  double value() const;
};

enum class Provenance { exact_radial, galerkin };

struct SpectrumEntry {
  double value = 0.0;
  Count multiplicity = 1;
};

/// Eigenvalues sorted by decreasing absolute value.
struct Spectrum {
  std::vector<SpectrumEntry> entries;
  int K = 0;
  Provenance provenance = Provenance::exact_radial;
};

/// mu_k = (2k + d) int_0^1 v(r) r^{2k+d-1} dr by Gauss quadrature adapted to
/// each profile (Legendre on the step support, Jacobi with the (1-r)^gamma
/// weight for power profiles, per-segment Legendre for samples).
double mu_k(const RadialSymbol& v, int d, long long k);

double mu_k_step(double b, double c, int d, long long k);
double mu_k_power(double a, double gamma, int d, long long k);

/// mu_k from closed forms in the log domain: exact for step and power
/// profiles, segment-wise exact for piecewise-linear samples.
SignedLog log_mu(const RadialSymbol& v, int d, long long k);

/// Exact radial spectrum over degrees 0..K.
Spectrum radial_spectrum(const RadialSymbol& v, int d, int K);

/// Number of eigenvalues of +-T_V strictly above lambda, with multiplicity.
/// Throws TailNotCertified when the tail beyond the last examined degree
/// cannot be bounded below lambda.
Count counting(const RadialSymbol& v, int d, Threshold lambda, Sign sign = Sign::plus);

/// counting() for many thresholds, sharing one pass over the degrees.
std::vector<Count> counting_many(const RadialSymbol& v, int d, std::span<const double> log_lambdas,
                                 Sign sign = Sign::plus);

/// Leading coefficient of n_+ ~ C |ln lambda|^{d-1} for the step profile.
double step_constant(int d, double c);
/// Leading coefficient of n_+ ~ C lambda^{-(d-1)/gamma} for a(1-r)^gamma.
double power_constant(int d, double gamma, double a);
/// The boundary-integral form of the same constant, for a constant trace a0.
double theorem1_constant(int d, double gamma, double a0);

enum class FitModel { log_power, power };

struct FitResult {
  /// Slope of ln n_+ against ln x from an unconstrained least-squares fit,
  /// x = |ln lambda| (log-power) or 1/lambda (power).
  double exponent = 0.0;
  double exponent_intercept = 0.0;
  double exponent_residual = 0.0;
  /// Leading coefficient from the fit n_+ = C x^e + B x^{e-s} with the
  /// exponent e pinned to its theoretical value.
  double coefficient = 0.0;
  double subleading = 0.0;
  double pinned_exponent = 0.0;
  /// n_+ / x^e at the smallest lambda of the grid.
  double point_ratio = 0.0;
  std::vector<double> log_lambdas;
  std::vector<Count> counts;
};

/// Fits counting data on a decreasing grid of ln lambda values (at least 4
/// with nonzero counts). The power model reads gamma from the power
/// component of the symbol.
FitResult asymptotic_fit(const RadialSymbol& v, int d, std::span<const double> log_lambdas, FitModel model);

/// Pinned two-term fit of externally supplied counts n_i at x_i:
/// n = C x^e + B x^{e - s}.
FitResult fit_counts(std::span<const double> xs, std::span<const Count> counts, double pinned_exponent,
                     double correction_step);

struct SchattenValue {
  /// Norm over degrees 0..k_stop.
  double value = 0.0;
  /// Certified upper bound for the full norm (value plus tail).
  double upper = 0.0;
  long long k_stop = 0;
};

/// Schatten p-norm (weak = false, p >= 1) or weak quasinorm sup_j j^{1/p}
/// s_j (weak = true, p > 1). Throws TailNotCertified if the tail cannot be
/// bounded.
SchattenValue schatten_radial(const RadialSymbol& v, int d, double p, bool weak, long long k_stop);

struct DecayProfile {
  /// ln of max_{j <= j_max} j^alpha s_j, and the maximising index.
  double log_sup = 0.0;
  long long argmax = 0;
  /// ln(j_max^alpha s_{j_max}).
  double log_at_jmax = 0.0;
  /// ln of a bound for sup_{j > j_max} j^alpha s_j.
  double log_tail_bound = 0.0;
};

/// sup_j j^alpha s_j for a profile supported in [0, c], c < 1.
DecayProfile superpolynomial_decay_check(const RadialSymbol& v, int d, double alpha, long long j_max);

/// ln of a bound B(k) >= max(+-mu_j, 0) for all j >= k (abs = false) or
/// B(k) >= |mu_j| (abs = true); non-increasing in k.
double log_tail_majorant(const RadialSymbol& v, int d, long long k, bool abs);

/// Smallest gamma among the power components, or 0 when there is none.
double power_exponent(const RadialSymbol& v);

}  // namespace harmotop
