#include "doctest.h"
#include "harmotop/errors.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/kernel_berezin.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using namespace harmotop;
using std::numbers::pi;

namespace {

std::vector<double> random_point(std::mt19937& gen, int d, double max_r) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, max_r);
  std::vector<double> x(d);
  double s = 0;
  for (auto& c : x) {
    c = normal(gen);
    s += c * c;
  }
  const double r = uni(gen);
  for (auto& c : x) c *= r / std::sqrt(s);
  return x;
}

GeneralSymbol from_function(std::function<double(std::span<const double>)> f, std::vector<double> breaks = {}) {
  GeneralSymbol g;
  g.eval = std::move(f);
  g.radial_breaks = std::move(breaks);
  g.label = "test";
  return g;
}

}  // namespace

TEST_CASE("kernel at the origin") {
  const std::array<double, 2> o2{0, 0};
  const std::array<double, 3> o3{0, 0, 0};
  CHECK(reproducing_kernel(2, o2, o2, 10) == doctest::Approx(1 / pi).epsilon(1e-14));
  CHECK(density_rho(2, o2, 10) == doctest::Approx(1 / pi).epsilon(1e-14));
  CHECK(density_rho(3, o3, 10) == doctest::Approx(3 / (4 * pi)).epsilon(1e-14));
  const std::array<double, 2> out{0.6, 0.8};
  CHECK_THROWS_AS(density_rho(2, out, 3), std::domain_error);
  CHECK_THROWS_AS(reproducing_kernel(2, o2, out, 3), std::domain_error);
}

TEST_CASE("kernel equals the sum over the orthonormal basis") {
  std::mt19937 gen(7);
  for (int d : {2, 3})
    for (int trial = 0; trial < 20; ++trial) {
      const int K = 9;
      auto x = random_point(gen, d, 0.95);
      auto y = random_point(gen, d, 0.95);
      auto bx = basis_values_upto(d, K, x);
      auto by = basis_values_upto(d, K, y);
      double sum = 0, sxx = 0, syy = 0;
      for (std::size_t i = 0; i < bx.size(); ++i) {
        sum += bx[i] * by[i];
        sxx += bx[i] * bx[i];
        syy += by[i] * by[i];
      }
      const double kxy = reproducing_kernel(d, x, y, K);
      CHECK(kxy == doctest::Approx(sum).epsilon(1e-11));
      CHECK(kxy == reproducing_kernel(d, y, x, K));
      CHECK(density_rho(d, x, K) == doctest::Approx(sxx).epsilon(1e-11));
      CHECK(std::abs(kxy) <= std::sqrt(density_rho(d, x, K) * density_rho(d, y, K)) * (1 + 1e-12));
      (void)syy;
    }
}

TEST_CASE("density increases towards the boundary") {
  for (int d : {2, 3}) {
    double prev = 0;
    for (double r = 0.0; r < 0.99; r += 0.05) {
      std::vector<double> x(d, 0.0);
      x[0] = r;
      const double rho = density_rho(d, x, 30);
      CHECK(rho > prev);
      prev = rho;
    }
  }
}

TEST_CASE("density growth rate near the boundary") {
  for (int d : {2, 3}) {
    double lo = 1e300, hi = 0;
    for (double r : {0.5, 0.9, 0.99, 0.999}) {
      std::vector<double> x(d, 0.0);
      x[0] = r;
      const double scaled = density_rho(d, x, suggest_truncation(r)) * std::pow(1 - r, d);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    CHECK(lo > 0);
    CHECK(hi / lo <= 10);
  }
  CHECK(suggest_truncation(0.9) == 400);
}

TEST_CASE("rho integrals") {
  auto one = from_function([](std::span<const double>) { return 1.0; });
  CHECK(rho_integral(one, 2, TruncationSpec::for_degree(0)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rho_integral(one, 2, TruncationSpec::for_degree(3)) == doctest::Approx(7.0).epsilon(1e-13));
  CHECK(rho_integral(one, 3, TruncationSpec::for_degree(4)) == doctest::Approx(25.0).epsilon(1e-13));
  const auto step = RadialSymbol::step(1, 0.5);
  CHECK(std::abs(rho_integral(GeneralSymbol::lift(step), 2, TruncationSpec::for_degree(40)) - 5.0 / 12) < 1e-6);
  CHECK(std::abs(rho_integral(step, 2, 40) - 5.0 / 12) < 1e-6);
  // Radial series and grid agree at any K.
  for (int K : {0, 3, 12})
    CHECK(rho_integral(GeneralSymbol::lift(RadialSymbol::power(1, 1)), 3, TruncationSpec::for_degree(K)) ==
          doctest::Approx(rho_integral(RadialSymbol::power(1, 1), 3, K)).epsilon(1e-11));
  // An undeclared jump defeats the Gauss panels and is reported.
  auto hidden = from_function([](std::span<const double> x) { return std::hypot(x[0], x[1]) < 0.5 ? 1.0 : 0.0; });
  CHECK_THROWS_AS(rho_integral(hidden, 2, TruncationSpec::for_degree(2)), QuadratureDivergence);
}

TEST_CASE("Berezin transform") {
  auto one = from_function([](std::span<const double>) { return 1.0; });
  std::mt19937 gen(3);
  for (int d : {2, 3})
    for (int trial = 0; trial < 5; ++trial) {
      auto x = random_point(gen, d, 0.9);
      CHECK(berezin_transform(one, d, x, TruncationSpec::for_degree(6)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  // Grid route against the radial closed form.
  const auto step = RadialSymbol::step(1, 0.5);
  const std::array<double, 2> x{0.3, -0.4};
  CHECK(berezin_transform(GeneralSymbol::lift(step), 2, x, TruncationSpec::for_degree(15)) ==
        doctest::Approx(berezin_transform(step, 2, x, 15)).epsilon(1e-11));
  const std::array<double, 2> a{0.9, 0.0}, b{0.99, 0.0};
  const double ta = berezin_transform(step, 2, a, suggest_truncation(0.9));
  const double tb = berezin_transform(step, 2, b, suggest_truncation(0.99));
  CHECK(ta > tb);
  CHECK(tb >= 0);
  CHECK(tb < 1e-3);
  // Nonnegative symbol, nonnegative transform. The cubic symbol needs angular
  // order above 2K + 2 to be integrated exactly against R^2.
  auto bump = from_function([](std::span<const double> p) { return std::pow(p[0] + 1, 2) * (1 - p[1]); });
  for (int trial = 0; trial < 5; ++trial) CHECK(berezin_transform(bump, 2, random_point(gen, 2, 0.9), TruncationSpec{8, 16, 30}) >= 0);
}

TEST_CASE("boundary distance") {
  const std::array<double, 2> x{0.6, 0.0}, y{0.0, 0.8};
  CHECK(boundary_distance(x) == doctest::Approx(0.4));
  CHECK(separation(x, y) == doctest::Approx(1.0 + 0.4 + 0.2));
  CHECK(separation(x, y) >= std::hypot(0.6, 0.8));
}
