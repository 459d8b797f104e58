#include "doctest.h"
#include "harmotop/krein_counting.hpp"
#include "harmotop/numerics.hpp"
#include "harmotop/radial_toeplitz.hpp"

#include <cmath>
#include <stdexcept>

using namespace harmotop;

namespace {

// Power series of J_n in long double, adequate for x < 20.
long double bessel_series(int n, long double x) {
  long double term = 1, sum = 0;
  for (int i = 1; i <= n; ++i) term *= x / (2 * i);
  for (int m = 0; m < 80; ++m) {
    sum += term;
    term *= -(x * x / 4) / ((m + 1) * (long double)(m + n + 1));
  }
  return sum;
}

double bisect_zero(int n, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((bessel_series(n, lo) < 0) == (bessel_series(n, mid) < 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SandwichInput power_input(double lambda, double eps) {
  const auto v = RadialSymbol::power(1, 1);
  SandwichInput in;
  in.lambda = lambda;
  in.eps = eps;
  in.n_plus = [v](double l) { return counting(v, 2, Threshold::from_value(l)); };
  in.remainder = [](double e) { return remainder_model(e, 1.0, buckling_disk(1)[0].value, 2); };
  return in;
}

}  // namespace

TEST_CASE("sandwich intervals") {
  const auto in = power_input(1e-4, 0.1);
  const auto minus = sandwich_minus(in);
  CHECK(minus.lower == counting(RadialSymbol::power(1, 1), 2, Threshold::from_value(1e-4)));
  CHECK(to_double(minus.lower) == doctest::Approx(1e4).epsilon(0.001));
  CHECK(minus.well_formed());
  auto high = power_input(0.5, 0.1);
  const auto top = sandwich_minus(high);
  CHECK(top.lower == 0);
  CHECK(top.upper == high.remainder(0.1));
  auto bad = in;
  bad.eps = 1.0;
  CHECK_THROWS_AS(sandwich_minus(bad), std::invalid_argument);
  bad.eps = 0.0;
  CHECK_THROWS_AS(sandwich_plus(bad), std::invalid_argument);
}

TEST_CASE("sandwich collapse and nesting without remainder") {
  // Eigenvalues 1/2, 1/4, 1/8, ... each simple.
  auto n = [](double l) {
    Count c = 0;
    for (int j = 1; j < 60; ++j)
      if (std::ldexp(1.0, -j) > l) ++c;
    return c;
  };
  SandwichInput in;
  in.n_plus = n;
  in.remainder = [](double) { return Count(0); };
  in.lambda = 0.125;  // an eigenvalue: n(lambda) = 2, n(lambda-) = 3
  for (double eps : {0.1, 1e-3, 1e-9}) {
    in.eps = eps;
    const auto m = sandwich_minus(in);
    CHECK(m.lower == 2);
    CHECK(m.upper == 3);
    const auto p = sandwich_plus(in);
    CHECK(p.upper == 2);
    CHECK(p.well_formed());
  }
  in.lambda = 0.1;
  Count prev = -1;
  for (double eps : {0.9, 0.5, 0.3, 0.1, 0.01}) {
    in.eps = eps;
    const auto p = sandwich_plus(in);
    CHECK(p.lower >= prev);
    prev = p.lower;
  }
  in.offset = 5;
  CHECK(sandwich_plus(in).lower == 0);
  CHECK(sandwich_plus(in).upper == 0);
}

TEST_CASE("well-formed on a grid") {
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const auto in = power_input(std::pow(10.0, -1 - 0.2 * i), 0.02 + 0.045 * j);
      CHECK(sandwich_minus(in).well_formed());
      CHECK(sandwich_plus(in).well_formed());
    }
}

TEST_CASE("envelope") {
  CHECK(envelope_kappa(3) == doctest::Approx(0.6));
  CHECK(envelope_kappa(4) == doctest::Approx(2.0 / 3));
  CHECK(4.0 / (4 + 2) == doctest::Approx((4.0 - 2) / (4 - 1)));  // both branches agree at d = 4
  CHECK(envelope_kappa(6) == doctest::Approx(0.8));
  const auto e = corollary_f3_envelope(2, 1, 1, 1e-4);
  CHECK(e.main == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(e.kappa_exponent == doctest::Approx(0.5));
  CHECK(optimal_theta(2, 1) == doctest::Approx(0.5));
}

TEST_CASE("disk buckling values") {
  const auto b = buckling_disk(6);
  REQUIRE(b.size() == 6);
  const double j11 = bisect_zero(1, 3.5, 4.0);
  CHECK(std::abs(b[0].value - j11 * j11) < 1e-6);
  CHECK(std::abs(b[0].value - 14.68197064) < 1e-6);
  CHECK(b[0].multiplicity == 1);
  const double j21 = bisect_zero(2, 5.0, 5.3);
  CHECK(std::abs(b[1].value - j21 * j21) < 1e-6);
  CHECK(b[1].multiplicity == 2);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i].value > b[i - 1].value);
  CHECK(b.front().value > 0);
  // Zeros of consecutive orders interlace.
  const auto z1 = bessel_j_zeros_below(3, 40.0);
  const auto z2 = bessel_j_zeros_below(4, 40.0);
  for (std::size_t m = 0; m + 1 < z1.size() && m < z2.size(); ++m) {
    CHECK(z1[m] < z2[m]);
    CHECK(z2[m] < z1[m + 1]);
  }
}

TEST_CASE("buckling Weyl law") {
  CHECK(buckling_count(14.6) == 0);
  CHECK(buckling_count(14.7) == 1);
  const std::vector<double> energies{1e3, 2e3, 4e3, 7e3, 1e4};
  const auto fit = weyl_L_check(energies);
  for (std::size_t i = 1; i < fit.counts.size(); ++i) CHECK(fit.counts[i] >= fit.counts[i - 1]);
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit.point_ratio == doctest::Approx(0.25).epsilon(0.1));
  CHECK(fit.coefficient == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("remainder model") {
  CHECK(remainder_model(1.0, 1.0, 10.0, 2) == 0);
  Count brute = 0;
  for (const auto& b : buckling_disk(40))
    if (b.value < 110) brute += b.multiplicity;
  CHECK(remainder_model(0.01, 1.0, 10.0, 2) == brute);
  Count prev = 1 << 30;
  for (double eps : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
    const Count r = remainder_model(eps, 1.0, 14.68, 2);
    CHECK(r <= prev);
    prev = r;
  }
  CHECK(remainder_model(0.5, 1.0, 2.0, 3) == 8);  // floor(4^{3/2})
}
