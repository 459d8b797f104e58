#include "doctest.h"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace harmotop;
using std::numbers::pi;

namespace {

// Tensor quadrature on the unit ball built here so the test does not depend on
// the library's own grid code.
struct BallQuad {
  std::vector<std::array<double, 3>> pts;
  std::vector<double> w;
};

BallQuad ball_quad(int d, int nr, int nang) {
  BallQuad q;
  auto rad = gauss_legendre(nr, 0.0, 1.0);
  if (d == 2) {
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nang; ++j) {
        const double th = 2 * pi * j / nang;
        const double r = rad.nodes[i];
        q.pts.push_back({r * std::cos(th), r * std::sin(th), 0.0});
        q.w.push_back(rad.weights[i] * r * 2 * pi / nang);
      }
    return q;
  }
  auto pol = gauss_legendre(nang / 2 + 1, -1.0, 1.0);
  for (int i = 0; i < nr; ++i)
    for (std::size_t a = 0; a < pol.nodes.size(); ++a)
      for (int j = 0; j < nang; ++j) {
        const double r = rad.nodes[i];
        const double t = pol.nodes[a];
        const double s = std::sqrt(1 - t * t);
        const double ph = 2 * pi * j / nang;
        q.pts.push_back({r * s * std::cos(ph), r * s * std::sin(ph), r * t});
        q.w.push_back(rad.weights[i] * r * r * pol.weights[a] * 2 * pi / nang);
      }
  return q;
}

double eval(int d, BasisIndex idx, std::array<double, 3> p) { return basis_value(d, idx, std::span<const double>(p.data(), d)); }

}  // namespace

TEST_CASE("multiplicity examples") {
  CHECK(multiplicity(2, 0) == 1);
  CHECK(multiplicity(2, 5) == 2);
  CHECK(multiplicity(3, 2) == 5);
  CHECK(multiplicity(4, 1) == 4);
  CHECK(cumulative_multiplicity(2, 3) == 7);
  CHECK(cumulative_multiplicity(3, 2) == 9);
  for (int d = 2; d <= 6; ++d) CHECK(cumulative_multiplicity(d, -1) == 0);
  CHECK_THROWS_AS(multiplicity(1, 0), std::invalid_argument);
}

TEST_CASE("cumulative multiplicity is the running sum") {
  for (int d = 2; d <= 6; ++d) {
    Count running = 0;
    for (int k = 0; k <= 200; ++k) {
      running += multiplicity(d, k);
      CHECK(cumulative_multiplicity(d, k) - cumulative_multiplicity(d, k - 1) == multiplicity(d, k));
      CHECK(cumulative_multiplicity(d, k) == running);
    }
  }
  // d = 3: m_k = 2k + 1, M_k = (k+1)^2.
  CHECK(cumulative_multiplicity(3, 4000000000LL) == Count(4000000001LL) * Count(4000000001LL));
}

TEST_CASE("multiplicity asymptotic deviation") {
  CHECK(multiplicity_asymptotic_check(2, 10) == doctest::Approx(0.5));
  CHECK(multiplicity_asymptotic_check(2, 1000) == doctest::Approx(0.5));
  // d = 3: M_k/k^2 - 1 = 2/k + 1/k^2, so the scaled deviation is 2 + 1/k.
  CHECK(multiplicity_asymptotic_check(3, 10000) == doctest::Approx(2.0 + 1.0 / 5000).epsilon(1e-12));
  CHECK(multiplicity_asymptotic_check(5, 1000) < 10.0);
  CHECK_THROWS_AS(multiplicity_asymptotic_check(2, 9), std::invalid_argument);
}

TEST_CASE("sphere surface area") {
  CHECK(sphere_surface_area(2) == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(sphere_surface_area(3) == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(sphere_surface_area(4) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
}

TEST_CASE("explicit low-degree harmonics") {
  const std::array<double, 2> e1{1.0, 0.0};
  CHECK(spherical_harmonic(2, {0, 1}, e1) == doctest::Approx(1 / std::sqrt(2 * pi)));
  CHECK(spherical_harmonic(2, {1, 1}, e1) == doctest::Approx(1 / std::sqrt(pi)));
  const std::array<double, 3> p{0.48, 0.6, 0.64};
  CHECK(spherical_harmonic(3, {0, 1}, p) == doctest::Approx(1 / std::sqrt(4 * pi)));
  const double c1 = std::sqrt(3 / (4 * pi));
  CHECK(spherical_harmonic(3, {1, 1}, p) == doctest::Approx(c1 * p[2]));
  CHECK(spherical_harmonic(3, {1, 2}, p) == doctest::Approx(c1 * p[0]));
  CHECK(spherical_harmonic(3, {1, 3}, p) == doctest::Approx(c1 * p[1]));
  CHECK(spherical_harmonic(3, {2, 1}, p) == doctest::Approx(std::sqrt(5 / (16 * pi)) * (3 * p[2] * p[2] - 1)));
  const std::array<double, 3> bad{0.5, 0.0, 0.0};
  CHECK_THROWS_AS(spherical_harmonic(3, {0, 1}, bad), std::invalid_argument);
  CHECK_THROWS_AS(spherical_harmonic(3, {1, 4}, p), std::invalid_argument);
}

TEST_CASE("harmonics_upto agrees with single evaluations") {
  const std::array<double, 3> p{-0.36, 0.48, 0.8};
  auto all = harmonics_upto(3, 7, p);
  REQUIRE(all.size() == 64);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == doctest::Approx(spherical_harmonic(3, basis_index(3, i), p)));
  CHECK(flat_index(3, {2, 3}) == 6);
  CHECK(basis_index(3, 6).k == 2);
  CHECK(basis_index(3, 6).l == 3);
}

TEST_CASE("zonal sums") {
  for (int d : {2, 3, 4, 5})
    for (int k : {0, 1, 4, 9}) CHECK(zonal_sum(d, k, 1.0) * sphere_surface_area(d) == doctest::Approx(to_double(multiplicity(d, k))).epsilon(1e-12));
  CHECK(std::abs(zonal_sum(2, 1, 0.0)) < 1e-15);
  CHECK(zonal_sum(3, 1, 0.3) == doctest::Approx(3 * 0.3 / (4 * pi)));
  CHECK_THROWS_AS(zonal_sum(3, 2, 1.2), std::domain_error);
  // Addition theorem against explicit harmonics.
  const std::array<double, 3> a{0.0, 0.6, 0.8};
  const std::array<double, 3> b{0.48, -0.64, 0.6};
  const double t = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  auto ha = harmonics_upto(3, 6, a);
  auto hb = harmonics_upto(3, 6, b);
  for (int k = 0; k <= 6; ++k) {
    double s = 0;
    for (std::size_t i = flat_index(3, {k, 1}); i < static_cast<std::size_t>(cumulative_multiplicity(3, k)); ++i) s += ha[i] * hb[i];
    CHECK(s == doctest::Approx(zonal_sum(3, k, t)).epsilon(1e-12));
  }
}

TEST_CASE("basis values") {
  const std::array<double, 3> x{0.3, -0.2, 0.0};
  CHECK(eval(2, {0, 1}, x) == doctest::Approx(1 / std::sqrt(pi)));
  const std::array<double, 3> zero{0, 0, 0};
  CHECK(eval(2, {1, 1}, zero) == 0.0);
  CHECK(eval(3, {2, 4}, zero) == 0.0);
  CHECK(eval(3, {0, 1}, zero) == doctest::Approx(std::sqrt(3.0) / std::sqrt(4 * pi)));
  const std::array<double, 3> out{0.8, 0.6, 0.0};
  CHECK_THROWS_AS(eval(2, {0, 1}, out), std::domain_error);
  // Homogeneity along rays.
  const std::array<double, 3> xi{0.36, 0.48, 0.8};
  for (int k = 0; k <= 5; ++k)
    for (double r : {0.1, 0.5, 0.9}) {
      std::array<double, 3> rx{r * xi[0], r * xi[1], r * xi[2]};
      const BasisIndex idx{k, k > 0 ? 2 : 1};
      const double expected = std::sqrt(2.0 * k + 3) * std::pow(r, k) * spherical_harmonic(3, idx, xi);
      CHECK(std::abs(eval(3, idx, rx) - expected) < 1e-12);
    }
}

TEST_CASE("basis is harmonic (finite-difference Laplacian)") {
  // Fourth-order stencil: exact for the degree <= 5 polynomials tested, so only
  // rounding remains.
  const double h = 1e-2;
  for (int d : {2, 3}) {
    const std::array<double, 3> p{0.21, -0.33, d == 3 ? 0.17 : 0.0};
    for (std::size_t i = 0; i < static_cast<std::size_t>(cumulative_multiplicity(d, 5)); ++i) {
      const BasisIndex idx = basis_index(d, i);
      double lap = 0;
      for (int c = 0; c < d; ++c) {
        auto at = [&](double shift) {
          auto q = p;
          q[c] += shift;
          return eval(d, idx, q);
        };
        lap += (-at(2 * h) + 16 * at(h) - 30 * at(0) + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
      }
      CHECK(std::abs(lap) < 1e-8);
    }
  }
}

TEST_CASE("orthonormality over the ball") {
  for (int d : {2, 3}) {
    const int K = 6;
    auto q = ball_quad(d, K + 8, 2 * K + 4);
    const std::size_t n = static_cast<std::size_t>(cumulative_multiplicity(d, K));
    Matrix gram(n, n);
    for (std::size_t s = 0; s < q.pts.size(); ++s) {
      auto v = basis_values_upto(d, K, std::span<const double>(q.pts[s].data(), d));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gram(i, j) += q.w[s] * v[i] * v[j];
    }
    double err = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) err = std::max(err, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(err < 1e-9);
  }
  // Single element (2, 3, 2).
  auto q = ball_quad(2, 12, 16);
  double s = 0;
  for (std::size_t i = 0; i < q.pts.size(); ++i) s += q.w[i] * std::pow(eval(2, {3, 2}, q.pts[i]), 2);
  CHECK(std::abs(s - 1) < 1e-10);
}
