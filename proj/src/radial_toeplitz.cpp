#include "harmotop/radial_toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "harmotop/errors.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/numerics.hpp"

namespace harmotop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
// Degree budget for enumerating counting functions term by term.
constexpr long long kMaxDegree = 100'000'000;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

SignedLog signed_add(SignedLog x, SignedLog y) {
  if (x.sign == 0) return y;
  if (y.sign == 0) return x;
  if (x.sign == y.sign) return {x.sign, log_add(x.log_abs, y.log_abs)};
  // Opposite signs: the larger magnitude keeps its sign.
  if (x.log_abs == y.log_abs) return {0, 0.0};
  const SignedLog& big = x.log_abs > y.log_abs ? x : y;
  const SignedLog& small = x.log_abs > y.log_abs ? y : x;
  return {big.sign, big.log_abs + std::log(-std::expm1(small.log_abs - big.log_abs))};
}

SignedLog from_value(double v) {
  if (v == 0.0) return {0, 0.0};
  return {v > 0 ? 1 : -1, std::log(std::abs(v))};
}

void require_degree(long long k) {
  if (k < 0) throw std::invalid_argument("degree k must be nonnegative");
}

struct Segment {
  double a, b;    // radial interval
  double va, vb;  // values at the ends (linear in between)
};

std::vector<Segment> segments(const SampledProfile& s) {
  std::vector<Segment> out;
  if (s.r.front() > 0.0) out.push_back({0.0, s.r.front(), s.v.front(), s.v.front()});
  for (std::size_t i = 0; i + 1 < s.r.size(); ++i) out.push_back({s.r[i], s.r[i + 1], s.v[i], s.v[i + 1]});
  out.push_back({s.r.back(), 1.0, s.v.back(), s.v.back()});
  return out;
}

const QuadratureRule& unit_gl64() {
  static const QuadratureRule rule = gauss_legendre(64, 0.0, 1.0);
  return rule;
}

// (2k + d) int_a^b v(r) r^n dr with n = 2k + d - 1, v linear on [a, b], as a
// signed logarithm. The integral is scaled by b^n so nothing underflows.
SignedLog segment_log(const Segment& sg, int d, long long k) {
  const double n = 2.0 * k + d - 1.0;
  if (sg.va == 0.0 && sg.vb == 0.0) return {0, 0.0};
  const double a = sg.a, b = sg.b;
  const double slope = (sg.vb - sg.va) / (b - a);
  const double q = a / b;
  double scaled;  // int_a^b v(r) (r/b)^n dr
  if (n <= 120.0 || n * (1.0 - q) <= 50.0) {
    const auto& rule = unit_gl64();
    scaled = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = a + (b - a) * rule.nodes[i];
      const double v = sg.va + slope * (r - a);
      scaled += rule.weights[i] * (b - a) * v * std::exp(n * std::log(r / b));
    }
  } else {
    // v(r) = v(b) + slope (r - b); both moments in cancellation-free form.
    const double qn1 = q > 0.0 ? std::exp((n + 1.0) * std::log(q)) : 0.0;
    const double m0 = q > 0.0 ? -std::expm1((n + 1.0) * std::log(q)) / (n + 1.0) : 1.0 / (n + 1.0);
    const double m1 = -1.0 / ((n + 1.0) * (n + 2.0)) + qn1 * (1.0 / (n + 1.0) - q / (n + 2.0));
    scaled = sg.vb * b * m0 + slope * b * b * m1;
  }
  SignedLog out = from_value(scaled);
  if (out.sign != 0) out.log_abs += std::log(2.0 * k + d) + n * std::log(b);
  return out;
}

double unsafe_power_log(double a_abs, double gamma, int d, long long k) {
  return std::log(a_abs) + log_gamma(gamma + 1.0) - log_gamma_ratio(2.0 * k + d + 1.0, gamma);
}

}  // namespace

Threshold Threshold::from_value(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("threshold lambda must be positive and finite");
  return Threshold(std::log(lambda), std::log(static_cast<long double>(lambda)));
}

Threshold Threshold::from_log(double log_lambda) {
  if (!std::isfinite(log_lambda)) throw std::invalid_argument("ln lambda must be finite");
  return Threshold(log_lambda, log_lambda);
}

double Threshold::value() const { return std::exp(log_); }

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

double mu_k_step(double b, double c, int d, long long k) {
  require_dimension(d);
  require_degree(k);
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("step: c must lie in (0, 1)");
  if (b == 0.0) return 0.0;
  return (b > 0 ? 1.0 : -1.0) * std::exp(std::log(std::abs(b)) + (2.0 * k + d) * std::log(c));
}

double mu_k_power(double a, double gamma, int d, long long k) {
  require_dimension(d);
  require_degree(k);
  if (!(gamma > 0.0)) throw std::invalid_argument("power: gamma must be positive");
  if (a == 0.0) return 0.0;
  return (a > 0 ? 1.0 : -1.0) * std::exp(unsafe_power_log(std::abs(a), gamma, d, k));
}

SignedLog log_mu(const RadialSymbol& v, int d, long long k) {
  require_dimension(d);
  require_degree(k);
  return std::visit(overloaded{
                        [&](const StepProfile& s) -> SignedLog {
                          if (s.b == 0.0) return {0, 0.0};
                          return {s.b > 0 ? 1 : -1, std::log(std::abs(s.b)) + (2.0 * k + d) * std::log(s.c)};
                        },
                        [&](const PowerProfile& p) -> SignedLog {
                          if (p.a == 0.0) return {0, 0.0};
                          return {p.a > 0 ? 1 : -1, unsafe_power_log(std::abs(p.a), p.gamma, d, k)};
                        },
                        [&](const SampledProfile& s) {
                          SignedLog total{0, 0.0};
                          for (const auto& sg : segments(s)) total = signed_add(total, segment_log(sg, d, k));
                          return total;
                        },
                        [&](const SumProfile& s) {
                          SignedLog total{0, 0.0};
                          for (const auto& part : s.parts) total = signed_add(total, log_mu(part, d, k));
                          return total;
                        },
                    },
                    v.profile());
}

double mu_k(const RadialSymbol& v, int d, long long k) {
  require_dimension(d);
  require_degree(k);
  const double n = 2.0 * k + d - 1.0;
  // Exact for polynomial integrands of degree n + 1.
  const int order = static_cast<int>(k) + (d + 1) / 2 + 2;
  auto monomial = [n](double r) { return std::pow(r, n); };
  return std::visit(overloaded{
                        [&](const StepProfile& s) {
                          return s.b * (2.0 * k + d) * gauss_legendre(order, 0.0, s.c).integrate(monomial);
                        },
                        [&](const PowerProfile& p) {
                          return p.a * (2.0 * k + d) * gauss_jacobi(order, p.gamma, 0.0, 0.0, 1.0).integrate(monomial);
                        },
                        [&](const SampledProfile& s) {
                          double total = 0.0;
                          for (const auto& sg : segments(s)) {
                            const double slope = (sg.vb - sg.va) / (sg.b - sg.a);
                            total += gauss_legendre(order, sg.a, sg.b).integrate([&](double r) {
                              return (sg.va + slope * (r - sg.a)) * std::pow(r, n);
                            });
                          }
                          return (2.0 * k + d) * total;
                        },
                        [&](const SumProfile& s) {
                          double total = 0.0;
                          for (const auto& part : s.parts) total += mu_k(part, d, k);
                          return total;
                        },
                    },
                    v.profile());
}

Spectrum radial_spectrum(const RadialSymbol& v, int d, int K) {
  if (K < 0) throw std::invalid_argument("radial_spectrum: K must be >= 0");
  Spectrum out;
  out.K = K;
  out.provenance = Provenance::exact_radial;
  for (int k = 0; k <= K; ++k) out.entries.push_back({log_mu(v, d, k).value(), multiplicity(d, k)});
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const SpectrumEntry& x, const SpectrumEntry& y) { return std::abs(x.value) > std::abs(y.value); });
  return out;
}

double log_tail_majorant(const RadialSymbol& v, int d, long long k, bool abs) {
  require_degree(k);
  return std::visit(overloaded{
                        [&](const StepProfile& s) {
                          if (s.b == 0.0 || (!abs && s.b < 0.0)) return kNegInf;
                          return std::log(std::abs(s.b)) + (2.0 * k + d) * std::log(s.c);
                        },
                        [&](const PowerProfile& p) {
                          // mu_k itself decreases in k.
                          if (p.a == 0.0 || (!abs && p.a < 0.0)) return kNegInf;
                          return unsafe_power_log(std::abs(p.a), p.gamma, d, k);
                        },
                        [&](const SampledProfile& s) {
                          const std::size_t n = s.r.size();
                          std::vector<double> w(n);
                          for (std::size_t i = 0; i < n; ++i) w[i] = abs ? std::abs(s.v[i]) : std::max(0.0, s.v[i]);
                          std::vector<double> prefix(n), suffix(n);
                          for (std::size_t i = 0; i < n; ++i) prefix[i] = std::max(w[i], i ? prefix[i - 1] : 0.0);
                          for (std::size_t i = n; i-- > 0;) suffix[i] = std::max(w[i], i + 1 < n ? suffix[i + 1] : 0.0);
                          auto lg = [](double x) { return x > 0.0 ? std::log(x) : kNegInf; };
                          // Split at r0 = r_i: sup over [0, r0] damped by r0^{2k+d},
                          // plus the undamped sup over [r0, 1).
                          double best = lg(prefix[n - 1]);
                          for (std::size_t i = 0; i < n; ++i) {
                            const double damped =
                                s.r[i] > 0.0 ? lg(prefix[i]) + (2.0 * k + d) * std::log(s.r[i]) : kNegInf;
                            best = std::min(best, log_add(damped, lg(suffix[i])));
                          }
                          return best;
                        },
                        [&](const SumProfile& s) {
                          double total = kNegInf;
                          for (const auto& part : s.parts) total = log_add(total, log_tail_majorant(part, d, k, abs));
                          return total;
                        },
                    },
                    v.profile());
}

namespace {

// Limit of log_tail_majorant as k -> infinity.
double log_majorant_limit(const RadialSymbol& v, bool abs) {
  return std::visit(overloaded{
                        [&](const StepProfile&) { return kNegInf; },
                        [&](const PowerProfile&) { return kNegInf; },
                        [&](const SampledProfile& s) {
                          const double w = abs ? std::abs(s.v.back()) : std::max(0.0, s.v.back());
                          return w > 0.0 ? std::log(w) : kNegInf;
                        },
                        [&](const SumProfile& s) {
                          double total = kNegInf;
                          for (const auto& part : s.parts) total = log_add(total, log_majorant_limit(part, abs));
                          return total;
                        },
                    },
                    v.profile());
}

// Number of degrees k with mu_k > lambda for a single step or power profile
// with positive amplitude (mu_k strictly decreasing).
// ln Gamma(x + s) - ln Gamma(x) in long double; Stirling's series with log1p
// keeps the difference accurate for large x.
long double extended_log_gamma_ratio(long double x, long double s) {
  if (x < 30) return std::lgamma(x + s) - std::lgamma(x);
  auto tail = [](long double y) { return 1 / (12 * y) - 1 / (360 * y * y * y) + 1 / (1260 * y * y * y * y * y); };
  return (x - 0.5L) * std::log1p(s / x) + s * std::log(x + s) - s + tail(x + s) - tail(x);
}

long double extended_log_mu(const RadialSymbol& v, int d, long long k) {
  const long double n = 2.0L * k + d;
  if (const auto* s = std::get_if<StepProfile>(&v.profile()))
    return std::log(static_cast<long double>(s->b)) + n * std::log(static_cast<long double>(s->c));
  const auto& p = std::get<PowerProfile>(v.profile());
  return std::log(static_cast<long double>(p.a)) + std::lgamma(static_cast<long double>(p.gamma) + 1) -
         extended_log_gamma_ratio(n + 1, p.gamma);
}

long long monotone_nu(const RadialSymbol& v, int d, long double log_lambda) {
  auto above = [&](long long k) {
    const double gap = log_mu(v, d, k).log_abs - static_cast<double>(log_lambda);
    if (std::abs(gap) > 1e-12 * std::max(1.0, std::abs(static_cast<double>(log_lambda)))) return gap > 0.0;
    return extended_log_mu(v, d, k) > log_lambda;
  };
  if (!above(0)) return 0;
  long long lo = 0;  // above(lo) holds
  long long hi = 1;
  if (const auto* s = std::get_if<StepProfile>(&v.profile())) {
    // Closed form, then settle rounding by direct comparison.
    const double x = ((static_cast<double>(log_lambda) - std::log(s->b)) / std::log(s->c) - d) / 2.0;
    long long guess = std::max<long long>(1, static_cast<long long>(std::ceil(std::min(x, 4e18))));
    while (guess > 1 && !above(guess - 1)) --guess;
    while (above(guess)) ++guess;
    return guess;
  }
  while (above(hi)) {
    lo = hi;
    if (hi > (1LL << 61)) throw TailNotCertified("counting: degree search overflow");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (above(mid))
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

bool is_monotone_positive(const RadialSymbol& v) {
  if (const auto* s = std::get_if<StepProfile>(&v.profile())) return s->b > 0.0;
  if (const auto* p = std::get_if<PowerProfile>(&v.profile())) return p->a > 0.0;
  return false;
}

bool is_nonpositive_simple(const RadialSymbol& v) {
  if (const auto* s = std::get_if<StepProfile>(&v.profile())) return s->b <= 0.0;
  if (const auto* p = std::get_if<PowerProfile>(&v.profile())) return p->a <= 0.0;
  return false;
}

void split_monotone(const RadialSymbol& v, std::vector<RadialSymbol>& monotone, std::vector<RadialSymbol>& rest) {
  if (is_monotone_positive(v)) {
    monotone.push_back(v);
  } else if (const auto* sum = std::get_if<SumProfile>(&v.profile())) {
    for (const auto& part : sum->parts) split_monotone(part, monotone, rest);
  } else {
    rest.push_back(v);
  }
}

// Smallest k >= from with f(k) <= target, for f non-increasing.
template <class F>
long long first_at_or_below(F&& f, long long from, double target) {
  if (f(from) <= target) return from;
  long long lo = from, step = 1;
  long long hi = from + 1;
  while (f(hi) > target) {
    lo = hi;
    if (step > (1LL << 60)) throw TailNotCertified("counting: degree search overflow");
    step *= 2;
    hi = from + step;
  }
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (f(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// Counting when mu_k = P_k + E_k with P_k positive and non-increasing (a sum
// of positive step and power parts) and |E_k| <= exp(R(k)), R non-increasing
// and tending to -infinity. Degrees with P_k clearly above or below lambda
// are counted in bulk; only the window where |P_k - lambda| <= exp(R) is
// checked degree by degree.
Count split_counting(const std::vector<RadialSymbol>& monotone, const std::vector<RadialSymbol>& rest, int d,
                     double log_lambda) {
  auto log_p = [&](long long k) {
    double t = kNegInf;
    for (const auto& m : monotone) t = log_add(t, log_mu(m, d, k).log_abs);
    return t;
  };
  auto log_r = [&](long long k) {
    double t = kNegInf;
    for (const auto& r : rest) t = log_add(t, log_tail_majorant(r, d, k, true));
    return t;
  };
  auto exact_above = [&](long long k) {
    SignedLog t{0, 0.0};
    for (const auto& m : monotone) t = signed_add(t, log_mu(m, d, k));
    for (const auto& r : rest) t = signed_add(t, log_mu(r, d, k));
    return t.sign > 0 && t.log_abs > log_lambda;
  };
  constexpr long long kWindow = 4096;
  Count total = 0;
  // Below k0 the remainder may be comparable to lambda.
  const long long k0 = rest.empty() ? 0 : first_at_or_below(log_r, 0, log_lambda - std::log(2.0));
  for (long long k = 0; k < k0; ++k) {
    if (k > kMaxDegree)
      throw TailNotCertified("counting: tail not certified below lambda within " + std::to_string(kMaxDegree) +
                             " degrees");
    if (exact_above(k)) total += multiplicity(d, k);
  }
  for (long long k = k0;;) {
    const double r = log_r(k);
    const long long lo = first_at_or_below(log_p, k, log_add(log_lambda, r));
    total += cumulative_multiplicity(d, lo - 1) - cumulative_multiplicity(d, k - 1);
    if (r == kNegInf) return total;
    const long long hi = first_at_or_below(log_p, lo, log_lambda + std::log1p(-std::exp(r - log_lambda)));
    const long long stop = std::min(hi, lo + kWindow);
    for (long long j = lo; j < stop; ++j)
      if (exact_above(j)) total += multiplicity(d, j);
    if (stop == hi) return total;
    k = stop;
  }
}

}  // namespace

namespace {

std::vector<Count> counting_extended(const RadialSymbol& v, int d, std::span<const long double> extended, Sign sign) {
  require_dimension(d);
  std::vector<double> log_lambdas(extended.begin(), extended.end());
  for (double l : log_lambdas)
    if (!std::isfinite(l)) throw std::invalid_argument("ln lambda must be finite");
  const RadialSymbol s = sign == Sign::plus ? v : v.negated();
  std::vector<Count> out(log_lambdas.size(), 0);
  if (log_lambdas.empty()) return out;
  if (is_nonpositive_simple(s)) return out;
  if (is_monotone_positive(s)) {
    for (std::size_t i = 0; i < log_lambdas.size(); ++i)
      out[i] = cumulative_multiplicity(d, monotone_nu(s, d, extended[i]) - 1);
    return out;
  }
  std::vector<RadialSymbol> monotone, rest;
  split_monotone(s, monotone, rest);
  double rest_limit = kNegInf;
  for (const auto& r : rest) rest_limit = log_add(rest_limit, log_majorant_limit(r, true));
  if (!monotone.empty() && rest_limit == kNegInf) {
    for (std::size_t i = 0; i < log_lambdas.size(); ++i) out[i] = split_counting(monotone, rest, d, log_lambdas[i]);
    return out;
  }
  const double lowest = *std::min_element(log_lambdas.begin(), log_lambdas.end());
  if (log_majorant_limit(s, false) >= lowest)
    throw TailNotCertified("counting: the symbol does not decay below lambda near the boundary (ln lambda = " +
                           std::to_string(lowest) + ")");
  struct Hit {
    double log_mu;
    Count mult;
  };
  std::vector<Hit> hits;
  for (long long k = 0;; ++k) {
    if (k > kMaxDegree)
      throw TailNotCertified("counting: tail not certified below lambda within " + std::to_string(kMaxDegree) +
                             " degrees");
    if (log_tail_majorant(s, d, k, false) <= lowest) break;
    const SignedLog m = log_mu(s, d, k);
    if (m.sign > 0 && m.log_abs > lowest) hits.push_back({m.log_abs, multiplicity(d, k)});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.log_mu > b.log_mu; });
  std::vector<Count> cumulative(hits.size() + 1, 0);
  for (std::size_t i = 0; i < hits.size(); ++i) cumulative[i + 1] = cumulative[i] + hits[i].mult;
  for (std::size_t i = 0; i < log_lambdas.size(); ++i) {
    const double l = log_lambdas[i];
    // Number of hits strictly above l.
    const auto it = std::partition_point(hits.begin(), hits.end(), [l](const Hit& h) { return h.log_mu > l; });
    out[i] = cumulative[static_cast<std::size_t>(it - hits.begin())];
  }
  return out;
}

}  // namespace

std::vector<Count> counting_many(const RadialSymbol& v, int d, std::span<const double> log_lambdas, Sign sign) {
  const std::vector<long double> extended(log_lambdas.begin(), log_lambdas.end());
  return counting_extended(v, d, extended, sign);
}

Count counting(const RadialSymbol& v, int d, Threshold lambda, Sign sign) {
  const long double l = lambda.log_extended();
  return counting_extended(v, d, std::span<const long double>(&l, 1), sign)[0];
}

double step_constant(int d, double c) {
  require_dimension(d);
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("step_constant: c must lie in (0, 1)");
  return std::exp((2.0 - d) * std::log(2.0) - log_gamma(d) - (d - 1.0) * std::log(std::abs(std::log(c))));
}

double power_constant(int d, double gamma, double a) {
  require_dimension(d);
  if (!(gamma > 0.0) || !(a > 0.0)) throw std::invalid_argument("power_constant: a and gamma must be positive");
  return std::exp((2.0 - d) * std::log(2.0) - log_gamma(d) +
                  (d - 1.0) / gamma * (std::log(a) + log_gamma(gamma + 1.0)));
}

double theorem1_constant(int d, double gamma, double a0) {
  require_dimension(d);
  if (!(gamma > 0.0) || !(a0 > 0.0)) throw std::invalid_argument("theorem1_constant: a0 and gamma must be positive");
  const double pi = std::numbers::pi;
  const double n = d - 1.0;
  const double log_ball_volume = 0.5 * n * std::log(pi) - log_gamma(1.0 + 0.5 * n);
  const double log_inner = log_gamma(gamma + 1.0) / gamma - std::log(4.0 * pi);
  return std::exp(log_ball_volume + n * log_inner + n / gamma * std::log(a0)) * sphere_surface_area(d);
}

double power_exponent(const RadialSymbol& v) {
  return std::visit(overloaded{
                        [](const StepProfile&) { return 0.0; },
                        [](const PowerProfile& p) { return p.gamma; },
                        [](const SampledProfile&) { return 0.0; },
                        [](const SumProfile& s) {
                          double g = 0.0;
                          for (const auto& part : s.parts) {
                            const double pg = power_exponent(part);
                            if (pg > 0.0 && (g == 0.0 || pg < g)) g = pg;
                          }
                          return g;
                        },
                    },
                    v.profile());
}

FitResult fit_counts(std::span<const double> xs, std::span<const Count> counts, double pinned_exponent,
                     double correction_step) {
  if (xs.size() != counts.size()) throw std::invalid_argument("fit: size mismatch");
  std::vector<double> lx, ln, ratio, corr;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (counts[i] <= 0) continue;
    if (!(xs[i] > 0.0)) throw std::invalid_argument("fit: abscissae must be positive");
    const double n = to_double(counts[i]);
    lx.push_back(std::log(xs[i]));
    ln.push_back(std::log(n));
    ratio.push_back(n * std::exp(-pinned_exponent * lx.back()));
    corr.push_back(std::exp(-correction_step * lx.back()));
  }
  if (lx.size() < 4) throw std::invalid_argument("fit: need at least 4 grid points with nonzero counts");
  FitResult out;
  out.pinned_exponent = pinned_exponent;
  Matrix free_design(lx.size(), 2);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    free_design(i, 0) = 1.0;
    free_design(i, 1) = lx[i];
  }
  const auto free_fit = least_squares(free_design, ln);
  out.exponent_intercept = free_fit[0];
  out.exponent = free_fit[1];
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ln[i] - free_fit[0] - free_fit[1] * lx[i];
    rss += r * r;
  }
  out.exponent_residual = std::sqrt(rss / lx.size());
  Matrix pinned(lx.size(), 2);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    pinned(i, 0) = 1.0;
    pinned(i, 1) = corr[i];
  }
  const auto pin = least_squares(pinned, ratio);
  out.coefficient = pin[0];
  out.subleading = pin[1];
  // Largest abscissa = deepest point of the grid.
  const auto deepest = std::max_element(lx.begin(), lx.end()) - lx.begin();
  out.point_ratio = ratio[static_cast<std::size_t>(deepest)];
  return out;
}

FitResult asymptotic_fit(const RadialSymbol& v, int d, std::span<const double> log_lambdas, FitModel model) {
  require_dimension(d);
  if (log_lambdas.size() < 4) throw std::invalid_argument("asymptotic_fit: need at least 4 grid points");
  for (std::size_t i = 1; i < log_lambdas.size(); ++i)
    if (!(log_lambdas[i] < log_lambdas[i - 1]))
      throw std::invalid_argument("asymptotic_fit: lambda grid must be strictly decreasing");
  double exponent = d - 1.0;
  double step = 1.0;
  if (model == FitModel::power) {
    const double gamma = power_exponent(v);
    if (gamma <= 0.0) throw std::invalid_argument("asymptotic_fit: the power model needs a power component");
    exponent = (d - 1.0) / gamma;
    step = 1.0 / gamma;
  } else if (log_lambdas.front() >= 0.0) {
    throw std::invalid_argument("asymptotic_fit: the log-power model needs lambda < 1");
  }
  auto counts = counting_many(v, d, log_lambdas, Sign::plus);
  std::vector<double> xs(log_lambdas.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = model == FitModel::power ? std::exp(-log_lambdas[i]) : -log_lambdas[i];
  FitResult out = fit_counts(xs, counts, exponent, step);
  out.log_lambdas.assign(log_lambdas.begin(), log_lambdas.end());
  out.counts = std::move(counts);
  return out;
}

namespace {

// Support radius of a profile vanishing near r = 1, or a negative value.
double support_radius(const RadialSymbol& v) {
  return std::visit(overloaded{
                        [](const StepProfile& s) { return s.c; },
                        [](const PowerProfile&) { return -1.0; },
                        [](const SampledProfile& s) {
                          if (s.v.back() != 0.0) return -1.0;
                          // Last node where v is nonzero on either side.
                          std::size_t last = 0;
                          for (std::size_t i = 0; i < s.v.size(); ++i)
                            if (s.v[i] != 0.0) last = i + 1;
                          if (last == 0) return 0.0;
                          return s.r[std::min(last, s.r.size() - 1)];
                        },
                        [](const SumProfile& s) {
                          double r = 0.0;
                          for (const auto& part : s.parts) {
                            const double pr = support_radius(part);
                            if (pr < 0.0) return -1.0;
                            r = std::max(r, pr);
                          }
                          return r;
                        },
                    },
                    v.profile());
}

double sup_abs(const RadialSymbol& v) {
  return std::visit(overloaded{
                        [](const StepProfile& s) { return std::abs(s.b); },
                        [](const PowerProfile& p) { return std::abs(p.a); },
                        [](const SampledProfile& s) {
                          double m = 0.0;
                          for (double x : s.v) m = std::max(m, std::abs(x));
                          return m;
                        },
                        [](const SumProfile& s) {
                          double m = 0.0;
                          for (const auto& part : s.parts) m += sup_abs(part);
                          return m;
                        },
                    },
                    v.profile());
}

// ln sup_{k >= K+1} |b| c^{2k+d} M_k^q using M_k <= x^{d-1}, x = 2k + d + 1.
double geometric_weak_tail(double b, double c, int d, double q, long long K) {
  if (b == 0.0 || c <= 0.0) return kNegInf;
  const double lc = std::log(c);
  const double x0 = 2.0 * (K + 1) + d + 1.0;
  const double x_star = q * (d - 1.0) / -lc;
  const double x = std::max(x0, x_star);
  return std::log(b) + (x - 1.0) * lc + q * (d - 1.0) * std::log(x);
}

// ln sum_{k >= K+1} m_k |b|^p c^{p(2k+d)} via a ratio bound on the terms.
double geometric_strong_tail(double b, double c, int d, double p, long long K) {
  if (b == 0.0 || c <= 0.0) return kNegInf;
  const double lc = std::log(c);
  double acc = kNegInf;
  for (long long k = K + 1;; ++k) {
    const double term = std::log(to_double(multiplicity(d, k))) + p * (std::log(b) + (2.0 * k + d) * lc);
    if (k >= 1) {
      // m_{j+1}/m_j <= rho for all j >= k.
      const double kk = static_cast<double>(k);
      const double rho = (2 * kk + d) / (2 * kk + d - 2) * std::max(1.0, (kk + d - 2) / (kk + 1));
      const double q = rho * std::exp(2.0 * p * lc);
      if (q < 1.0) return log_add(acc, term - std::log1p(-q));
    }
    acc = log_add(acc, term);
  }
}

double weak_tail(const RadialSymbol& v, int d, double q, long long K) {
  return std::visit(overloaded{
                        [&](const StepProfile& s) { return geometric_weak_tail(std::abs(s.b), s.c, d, q, K); },
                        [&](const PowerProfile& p) {
                          if (p.a == 0.0) return kNegInf;
                          const double e = q * (d - 1.0) - p.gamma;
                          if (e > 0.0)
                            throw TailNotCertified("weak Schatten tail is infinite: (d-1)/p exceeds gamma");
                          const double x0 = 2.0 * (K + 1) + d + 1.0;
                          return std::log(std::abs(p.a)) + log_gamma(p.gamma + 1.0) + std::log1p(1.0 / x0) +
                                 e * std::log(x0);
                        },
                        [&](const SampledProfile& s) {
                          const double r = support_radius(RadialSymbol::sampled(s.r, s.v));
                          if (r < 0.0) throw TailNotCertified("sampled profile does not vanish near r = 1");
                          double m = 0.0;
                          for (double x : s.v) m = std::max(m, std::abs(x));
                          return geometric_weak_tail(m, r, d, q, K);
                        },
                        [&](const SumProfile& s) {
                          double total = kNegInf;
                          for (const auto& part : s.parts) total = log_add(total, weak_tail(part, d, q, K));
                          return total;
                        },
                    },
                    v.profile());
}

double strong_tail(const RadialSymbol& v, int d, double p, long long K) {
  return std::visit(overloaded{
                        [&](const StepProfile& s) { return geometric_strong_tail(std::abs(s.b), s.c, d, p, K); },
                        [&](const PowerProfile& pw) {
                          if (pw.a == 0.0) return kNegInf;
                          const double excess = pw.gamma * p - (d - 1.0);
                          if (excess <= 0.0)
                            throw TailNotCertified("Schatten tail diverges: gamma * p <= d - 1");
                          const double xk = 2.0 * K + d + 1.0;
                          const double xk1 = xk + 2.0;
                          const double log_amp = std::log(std::abs(pw.a)) + log_gamma(pw.gamma + 1.0);
                          return p * (log_amp + std::log1p(1.0 / xk1)) - excess * std::log(xk) - std::log(excess);
                        },
                        [&](const SampledProfile& s) {
                          const double r = support_radius(RadialSymbol::sampled(s.r, s.v));
                          if (r < 0.0) throw TailNotCertified("sampled profile does not vanish near r = 1");
                          double m = 0.0;
                          for (double x : s.v) m = std::max(m, std::abs(x));
                          return geometric_strong_tail(m, r, d, p, K);
                        },
                        [&](const SumProfile& s) {
                          double total = kNegInf;
                          for (const auto& part : s.parts) total = log_add(total, strong_tail(part, d, p, K));
                          return total + (p - 1.0) * std::log(static_cast<double>(s.parts.size()));
                        },
                    },
                    v.profile());
}

struct Block {
  double log_s;
  Count mult;
};

std::vector<Block> sorted_blocks(const RadialSymbol& v, int d, long long k_stop) {
  std::vector<Block> blocks;
  for (long long k = 0; k <= k_stop; ++k) {
    const SignedLog m = log_mu(v, d, k);
    blocks.push_back({m.sign == 0 ? kNegInf : m.log_abs, multiplicity(d, k)});
  }
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.log_s > b.log_s; });
  return blocks;
}

}  // namespace

SchattenValue schatten_radial(const RadialSymbol& v, int d, double p, bool weak, long long k_stop) {
  require_dimension(d);
  if (k_stop < 0) throw std::invalid_argument("schatten: k_stop must be >= 0");
  if (weak ? !(p > 1.0) : !(p >= 1.0)) throw std::invalid_argument("schatten: need p >= 1 (strong) or p > 1 (weak)");
  const auto blocks = sorted_blocks(v, d, k_stop);
  SchattenValue out;
  out.k_stop = k_stop;
  if (weak) {
    double best = kNegInf;
    Count j = 0;
    for (const auto& b : blocks) {
      j += b.mult;
      if (b.log_s == kNegInf) break;
      best = std::max(best, std::log(to_double(j)) / p + b.log_s);
    }
    const double tail = weak_tail(v, d, 1.0 / p, k_stop);
    out.value = std::exp(best);
    out.upper = std::exp(std::max(best, tail));
    return out;
  }
  double acc = kNegInf;
  for (const auto& b : blocks)
    if (b.log_s != kNegInf) acc = log_add(acc, std::log(to_double(b.mult)) + p * b.log_s);
  const double tail = strong_tail(v, d, p, k_stop);
  out.value = std::exp(acc / p);
  out.upper = std::exp(log_add(acc, tail) / p);
  return out;
}

DecayProfile superpolynomial_decay_check(const RadialSymbol& v, int d, double alpha, long long j_max) {
  require_dimension(d);
  if (!(alpha > 0.0)) throw std::invalid_argument("decay check: alpha must be positive");
  if (j_max < 1) throw std::invalid_argument("decay check: j_max must be >= 1");
  const double radius = support_radius(v);
  if (radius < 0.0 || radius >= 1.0) throw std::invalid_argument("decay check: profile must vanish near r = 1");
  DecayProfile out;
  if (radius == 0.0 || sup_abs(v) == 0.0) {
    out.log_sup = out.log_at_jmax = out.log_tail_bound = kNegInf;
    out.argmax = 1;
    return out;
  }
  // Degrees up to the first one whose block reaches j_max, then further
  // degrees until the majorant drops below the j_max-th collected value.
  long long k = 0;
  while (cumulative_multiplicity(d, k) < j_max) ++k;
  auto blocks = sorted_blocks(v, d, k);
  auto threshold = [&] {
    Count j = 0;
    for (const auto& b : blocks) {
      j += b.mult;
      if (j >= j_max) return b.log_s;
    }
    return kNegInf;
  };
  long long k_end = k;
  while (log_tail_majorant(v, d, k_end + 1, true) >= threshold()) {
    ++k_end;
    const SignedLog m = log_mu(v, d, k_end);
    blocks.push_back({m.sign == 0 ? kNegInf : m.log_abs, multiplicity(d, k_end)});
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.log_s > b.log_s; });
  }
  out.log_sup = kNegInf;
  out.argmax = 1;
  Count j = 0;
  for (const auto& b : blocks) {
    const Count start = j + 1;
    j += b.mult;
    const Count last = std::min<Count>(j, j_max);
    if (b.log_s != kNegInf) {
      const double val = alpha * std::log(to_double(last)) + b.log_s;
      if (val > out.log_sup) {
        out.log_sup = val;
        out.argmax = static_cast<long long>(last);
      }
    }
    if (start <= j_max && j >= j_max) out.log_at_jmax = alpha * std::log(static_cast<double>(j_max)) + b.log_s;
    if (j >= j_max) break;
  }
  long long k_tail = 0;
  while (cumulative_multiplicity(d, k_tail) <= j_max) ++k_tail;
  out.log_tail_bound = weak_tail(v, d, alpha, k_tail - 1);
  return out;
}

}  // namespace harmotop
