#include "doctest.h"
#include "harmotop/errors.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/radial_toeplitz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace harmotop;

namespace {

// Brute-force count with plain doubles: sum m_k over k <= k_max with mu_k > lambda.
Count brute_count(double (*mu)(long long), int d, double lambda, long long k_max) {
  Count n = 0;
  for (long long k = 0; k <= k_max; ++k)
    if (mu(k) > lambda) n += multiplicity(d, k);
  return n;
}

std::vector<double> log_grid(double hi, double lo, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = hi + (lo - hi) * i / (n - 1);
  return g;
}

}  // namespace

TEST_CASE("mu_k examples") {
  const auto one = RadialSymbol::sampled({0.0}, {1.0});
  for (int d : {2, 3, 5})
    for (int k : {0, 1, 7, 30}) {
      CHECK(mu_k(one, d, k) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(log_mu(one, d, k).value() == doctest::Approx(1.0).epsilon(1e-13));
    }
  CHECK(mu_k(RadialSymbol::step(1, 0.5), 2, 1) == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(mu_k(RadialSymbol::power(1, 1), 2, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(mu_k_step(1, 0.5, 2, 0) == doctest::Approx(0.25));
  CHECK(mu_k_step(2, 0.9, 3, 10) == doctest::Approx(2 * std::pow(0.9, 23)).epsilon(1e-14));
  CHECK(mu_k_power(1, 1, 2, 0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(mu_k_power(1, 2, 2, 0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  for (long long k : {10LL, 1000LL, 1000000LL})
    CHECK(mu_k_power(1, 1, 2, k) == doctest::Approx(1.0 / (2.0 * k + 3)).epsilon(1e-12));
  CHECK_THROWS_AS(mu_k_step(1, 1.0, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(mu_k_power(1, 0.0, 2, 0), std::invalid_argument);
}

TEST_CASE("quadrature and closed forms agree") {
  for (int d : {2, 3})
    for (int k = 0; k <= 30; ++k) {
      for (auto [b, c] : {std::pair{1.0, 0.5}, std::pair{-2.0, 0.9}, std::pair{0.3, 0.2}})
        CHECK(mu_k(RadialSymbol::step(b, c), d, k) == doctest::Approx(mu_k_step(b, c, d, k)).epsilon(1e-12));
      for (auto [a, g] : {std::pair{1.0, 0.5}, std::pair{3.0, 1.0}, std::pair{1.0, 2.0}, std::pair{2.0, 0.3}})
        CHECK(mu_k(RadialSymbol::power(a, g), d, k) == doctest::Approx(mu_k_power(a, g, d, k)).epsilon(1e-11));
    }
}

TEST_CASE("sampled profiles: quadrature vs log-domain route") {
  const auto bump = RadialSymbol::sampled({0.0, 0.2, 0.5, 0.7}, {1.0, 0.6, -0.4, 0.0});
  for (int d : {2, 3})
    for (int k : {0, 1, 5, 20, 60}) CHECK(log_mu(bump, d, k).value() == doctest::Approx(mu_k(bump, d, k)).epsilon(1e-11));
  // Large degrees: closed segment formula against a per-degree exact integral
  // of the linear piece on [0.5, 0.7]: v = -0.4 + 2 (r - 0.5).
  const auto ramp = RadialSymbol::sampled({0.5, 0.7}, {-0.4, 0.0});
  for (long long k : {200LL, 2000LL}) {
    const double n = 2.0 * k + 2;  // d = 3
    // (n+1) int_{0.5}^{0.7} (2r - 1.4) r^n dr + (n+1) int_0^{0.5} -0.4 r^n dr
    const double hi = 0.7, lo = 0.5;
    const double exact = (n + 1) * (2 * (std::pow(hi, n + 2) - std::pow(lo, n + 2)) / (n + 2) -
                                    1.4 * (std::pow(hi, n + 1) - std::pow(lo, n + 1)) / (n + 1)) -
                         0.4 * std::pow(lo, n + 1);
    CHECK(log_mu(ramp, 3, k).value() == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("step and power eigenvalues decrease") {
  for (int d : {2, 3}) {
    const auto s = RadialSymbol::step(1, 0.7);
    const auto p = RadialSymbol::power(1, 0.5);
    for (int k = 0; k < 1000; ++k) {
      CHECK(log_mu(s, d, k + 1).log_abs < log_mu(s, d, k).log_abs);
      CHECK(log_mu(p, d, k + 1).log_abs < log_mu(p, d, k).log_abs);
    }
  }
}

TEST_CASE("sampled limit at the boundary") {
  const auto v = RadialSymbol::sampled({0.0, 0.5, 0.9}, {1.0, 0.5, 0.3});
  CHECK(std::abs(log_mu(v, 2, 1000).value() - 0.3) < 1e-3);
  const auto w = RadialSymbol::sampled({0.0, 0.9}, {1.0, 0.0});
  CHECK(std::abs(log_mu(w, 3, 1000).value()) < 1e-3);
}

TEST_CASE("counting examples") {
  const auto s = RadialSymbol::step(1, 0.5);
  CHECK(counting(s, 2, Threshold::from_value(0.1)) == 1);
  // mu_2 = 1/64 > 0.01 > mu_3 = 1/256.
  CHECK(counting(s, 2, Threshold::from_value(0.01)) == 5);
  CHECK(counting(s, 2, Threshold::from_value(0.02)) == 3);
  CHECK(counting(s, 2, Threshold::from_value(0.3)) == 0);
  // Tie: lambda equal to mu_1 excludes it.
  CHECK(counting(s, 2, Threshold::from_value(0.0625)) == 1);
  CHECK(counting(s, 2, Threshold::from_value(0.1), Sign::minus) == 0);
  CHECK(counting(RadialSymbol::step(-1, 0.5), 2, Threshold::from_value(0.01), Sign::minus) == 5);
  CHECK_THROWS_AS(Threshold::from_value(0.0), std::invalid_argument);
}

TEST_CASE("counting against brute force") {
  auto step_mu = [](long long k) { return std::pow(0.7, 2.0 * k + 3); };
  auto power_mu = [](long long k) { return 2.0 / ((2.0 * k + 3) * (2.0 * k + 4)); };  // a=1, gamma=2, d=2
  for (double lambda : {0.2, 1e-2, 1e-4, 1e-7}) {
    CHECK(counting(RadialSymbol::step(1, 0.7), 3, Threshold::from_value(lambda)) == brute_count(step_mu, 3, lambda, 400));
    CHECK(counting(RadialSymbol::power(1, 2), 2, Threshold::from_value(lambda)) == brute_count(power_mu, 2, lambda, 20000));
  }
  // The general path (sum profile) agrees with the fast path.
  const auto split = RadialSymbol::sum({RadialSymbol::step(0.5, 0.7), RadialSymbol::step(0.5, 0.7)});
  for (double lambda : {0.2, 1e-3, 1e-9})
    CHECK(counting(split, 3, Threshold::from_value(lambda)) == counting(RadialSymbol::step(1, 0.7), 3, Threshold::from_value(lambda)));
}

TEST_CASE("power plus a compact bump against brute force") {
  for (double bump : {0.5, -0.5}) {
    const auto v = RadialSymbol::sum({RadialSymbol::power(1, 2), RadialSymbol::step(bump, 0.5)});
    for (double lambda : {0.05, 1e-2, 1e-4, 1e-6}) {
      Count brute = 0;
      for (long long k = 0; k <= 2000000; ++k) {
        const double mu = 2.0 / ((2.0 * k + 3) * (2.0 * k + 4)) + bump * std::pow(0.5, 2.0 * k + 2);
        if (mu > lambda) brute += multiplicity(2, k);
      }
      CHECK(counting(v, 2, Threshold::from_value(lambda)) == brute);
    }
  }
}

TEST_CASE("exact ties are not counted") {
  // d = 3, a = gamma = 1: mu_k = 1/(2k+4), so mu_49998 = 1e-5 is not above 1e-5.
  CHECK(counting(RadialSymbol::power(1, 1), 3, Threshold::from_value(1e-5)) == cumulative_multiplicity(3, 49997));
  // d = 2, Step(1, 1/2): mu_1 = 1/16.
  CHECK(counting(RadialSymbol::step(1, 0.5), 2, Threshold::from_value(0.0625)) == 1);
}

TEST_CASE("counting is monotone and additive across signs") {
  const auto v = RadialSymbol::sampled({0.0, 0.3, 0.6}, {0.8, -0.5, 0.0});
  const auto grid = log_grid(0.0, -40.0, 41);
  auto plus = counting_many(v, 2, grid, Sign::plus);
  auto minus = counting_many(v, 2, grid, Sign::minus);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(plus[i] >= plus[i - 1]);
    CHECK(minus[i] >= minus[i - 1]);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(plus[i] == counting(v, 2, Threshold::from_log(grid[i])));
    Count brute = 0;
    for (int k = 0; k < 2000; ++k) {
      const SignedLog m = log_mu(v, 2, k);
      if (m.sign != 0 && m.log_abs > grid[i]) brute += multiplicity(2, k);
    }
    CHECK(plus[i] + minus[i] == brute);
  }
}

TEST_CASE("counting refuses uncertified tails") {
  const auto v = RadialSymbol::sampled({0.0, 0.5}, {1.0, 0.3});
  CHECK_THROWS_AS(counting(v, 2, Threshold::from_value(0.2)), TailNotCertified);
  // mu_0 = 0.358..., everything else lies below 0.35.
  CHECK(counting(v, 2, Threshold::from_value(0.35)) == 1);
  CHECK(counting(v, 2, Threshold::from_value(0.5)) == 0);
}

TEST_CASE("deep thresholds stay exact in the log domain") {
  // Step(1, 1/2), d = 2: mu_k > lambda iff (2k+2) ln 2 < -ln lambda.
  for (double ll : {-60.0, -123.4, -200.0}) {
    long long nu = 0;
    while ((2.0 * nu + 2) * std::log(2.0) < -ll) ++nu;
    CHECK(counting(RadialSymbol::step(1, 0.5), 2, Threshold::from_log(ll)) == cumulative_multiplicity(2, nu - 1));
  }
}

TEST_CASE("asymptotic constants") {
  CHECK(step_constant(2, 0.5) == doctest::Approx(1 / std::log(2.0)).epsilon(1e-14));
  // n = nu^2 with nu ~ |ln lambda| / (2 ln 2).
  CHECK(step_constant(3, 0.5) == doctest::Approx(0.25 / std::pow(std::log(2.0), 2)).epsilon(1e-14));
  CHECK(step_constant(2, std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(power_constant(2, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  // 2^{-1} / 2! * Gamma(3).
  CHECK(power_constant(3, 2, 1) == doctest::Approx(0.5).epsilon(1e-14));
  for (int d : {2, 3, 4})
    for (double g : {0.5, 1.0, 2.0})
      CHECK(power_constant(d, g, 2.0) == doctest::Approx(std::pow(2.0, (d - 1) / g) * power_constant(d, g, 1.0)).epsilon(1e-13));
  CHECK(theorem1_constant(2, 1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  for (int d = 2; d <= 5; ++d)
    for (double g : {0.5, 1.0, 2.0}) {
      CHECK(theorem1_constant(d, g, 1.7) == doctest::Approx(power_constant(d, g, 1.7)).epsilon(1e-12));
      CHECK(theorem1_constant(d, g, 2.0) > theorem1_constant(d, g, 1.0));
    }
}

TEST_CASE("asymptotic fits") {
  SUBCASE("step, log-power model") {
    const auto fit = asymptotic_fit(RadialSymbol::step(1, 0.5), 2, log_grid(-20.0, -60.0, 81), FitModel::log_power);
    CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.05));
    CHECK(fit.coefficient == doctest::Approx(step_constant(2, 0.5)).epsilon(0.02));
  }
  SUBCASE("power, d = 2, gamma = 1") {
    const auto fit = asymptotic_fit(RadialSymbol::power(1, 1), 2, log_grid(std::log(1e-2), std::log(1e-5), 40), FitModel::power);
    CHECK(fit.point_ratio == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("power, d = 3, gamma = 1/2") {
    const auto fit = asymptotic_fit(RadialSymbol::power(3, 0.5), 3, log_grid(std::log(1e-2), std::log(1e-6), 40), FitModel::power);
    CHECK(fit.exponent == doctest::Approx(4.0).epsilon(0.02));
  }
  CHECK_THROWS_AS(asymptotic_fit(RadialSymbol::step(1, 0.5), 2, log_grid(-1.0, -3.0, 3), FitModel::log_power), std::invalid_argument);
  CHECK_THROWS_AS(asymptotic_fit(RadialSymbol::step(1, 0.5), 2, log_grid(-3.0, -1.0, 5), FitModel::log_power), std::invalid_argument);
}

TEST_CASE("schatten norms") {
  const auto s = RadialSymbol::step(1, 0.5);
  auto strong = schatten_radial(s, 2, 1.0, false, 40);
  CHECK(strong.value == doctest::Approx(5.0 / 12).epsilon(1e-12));
  CHECK(strong.upper >= strong.value);
  CHECK(strong.upper == doctest::Approx(5.0 / 12).epsilon(1e-12));
  auto weak = schatten_radial(s, 2, 2.0, true, 40);
  CHECK(weak.value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(weak.upper == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(schatten_radial(RadialSymbol::sampled({0.0}, {0.0}), 3, 2.0, false, 10).value == 0.0);
  // Power (1,1), d = 2, p = 2: sum 2/(2k+3)^2 less the k = 0 correction.
  auto p2 = schatten_radial(RadialSymbol::power(1, 1), 2, 2.0, false, 2000);
  double sum = 1.0 / 9;
  for (int k = 1; k <= 2000; ++k) sum += 2.0 / std::pow(2.0 * k + 3, 2);
  CHECK(p2.value == doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
  const double full = std::sqrt(1.0 / 9 + 2 * (std::pow(std::numbers::pi, 2) / 8 - 1 - 1.0 / 9));
  CHECK(p2.upper >= full);
  CHECK(p2.upper <= full * 1.001);
  CHECK_THROWS_AS(schatten_radial(RadialSymbol::power(1, 1), 3, 2.0, false, 100), TailNotCertified);
  CHECK_THROWS_AS(schatten_radial(s, 2, 1.0, true, 10), std::invalid_argument);
}

TEST_CASE("superpolynomial decay") {
  const auto profile = superpolynomial_decay_check(RadialSymbol::step(1, 0.5), 2, 5.0, 10000);
  CHECK(profile.argmax <= 50);
  CHECK(profile.log_at_jmax < std::log(1e-100));
  CHECK(profile.log_tail_bound < profile.log_sup);
  // Brute force oracle: expand the sequence directly.
  double best = -1e300;
  long long j = 0;
  for (int k = 0; j < 10000; ++k)
    for (int rep = 0; rep < (k == 0 ? 1 : 2) && j < 10000; ++rep) {
      ++j;
      best = std::max(best, 5.0 * std::log(double(j)) + (2.0 * k + 2) * std::log(0.5));
    }
  CHECK(profile.log_sup == doctest::Approx(best).epsilon(1e-12));
  const auto zero = superpolynomial_decay_check(RadialSymbol::sampled({0.0, 0.5}, {0.0, 0.0}), 2, 5.0, 100);
  CHECK(std::exp(zero.log_sup) == 0.0);
  const auto bump = superpolynomial_decay_check(RadialSymbol::sampled({0.0, 0.35, 0.7}, {1.0, 0.5, 0.0}), 3, 8.0, 5000);
  CHECK(std::isfinite(bump.log_sup));
  CHECK(std::isfinite(bump.log_tail_bound));
  CHECK_THROWS_AS(superpolynomial_decay_check(RadialSymbol::power(1, 1), 2, 5.0, 10), std::invalid_argument);
}
