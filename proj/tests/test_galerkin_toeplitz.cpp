#include "doctest.h"
#include "harmotop/galerkin_toeplitz.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/kernel_berezin.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

using namespace harmotop;
using std::numbers::pi;

namespace {

GeneralSymbol from_function(std::function<double(std::span<const double>)> f, std::vector<double> breaks = {}) {
  GeneralSymbol g;
  g.eval = std::move(f);
  g.radial_breaks = std::move(breaks);
  g.label = "test";
  return g;
}

double max_offdiag(const Matrix& m) {
  double e = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) e = std::max(e, std::abs(m(i, j)));
  return e;
}

// int_0^{2 pi} cos(k t) cos(l t) dt
double cos_cos(int k, int l) {
  if (k != l) return 0.0;
  return k == 0 ? 2 * pi : pi;
}

}  // namespace

TEST_CASE("constant and odd symbols") {
  for (int d : {2, 3}) {
    const int K = 6;
    auto one = from_function([](std::span<const double>) { return 1.0; });
    const Matrix a = assemble(one, d, TruncationSpec::for_degree(K));
    REQUIRE(a.rows() == static_cast<std::size_t>(cumulative_multiplicity(d, K)));
    double err = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) err = std::max(err, std::abs(a(i, j) - (i == j)));
    CHECK(err < 1e-10);
  }
  auto odd = from_function([](std::span<const double> x) { return x[0]; });
  const Matrix a = assemble(odd, 2, TruncationSpec::for_degree(8));
  for (std::size_t i = 0; i < a.rows(); ++i) CHECK(std::abs(a(i, i)) < 1e-12);
}

TEST_CASE("radial symbols give diagonal sections") {
  for (int d : {2, 3})
    for (int K : {4, 12}) {
      for (const auto& v : {RadialSymbol::step(1, 0.5), RadialSymbol::power(1, 1), RadialSymbol::power(2, 0.5),
                            RadialSymbol::sampled({0.0, 0.3, 0.8}, {1.0, -0.5, 0.2})}) {
        const Matrix a = assemble(GeneralSymbol::lift(v), d, TruncationSpec::for_degree(K));
        CHECK(max_offdiag(a) < 1e-10);
        for (std::size_t i = 0; i < a.rows(); ++i) CHECK(std::abs(a(i, i) - log_mu(v, d, basis_index(d, i).k).value()) < 1e-10);
      }
    }
}

TEST_CASE("entries of a quadratic symbol against the factorised integral") {
  // V = x_1^2 = r^2 (1 + cos 2t) / 2 on the disc, cos-type basis functions.
  auto sq = from_function([](std::span<const double> x) { return x[0] * x[0]; });
  const int K = 6;
  // The symbol adds angular degree 2, so the trapezoid needs 2K + 4 points.
  const Matrix a = assemble(sq, 2, TruncationSpec{K, K + 8, 2 * K + 4});
  for (int k = 0; k <= K; ++k)
    for (int l = 0; l <= K; ++l) {
      const double ck = k == 0 ? 1 / std::sqrt(2 * pi) : 1 / std::sqrt(pi);
      const double cl = l == 0 ? 1 / std::sqrt(2 * pi) : 1 / std::sqrt(pi);
      const double radial = std::sqrt((2.0 * k + 2) * (2.0 * l + 2)) / (k + l + 4);
      const double angular = 0.5 * cos_cos(k, l) + 0.25 * (cos_cos(k + 2, l) + cos_cos(std::abs(k - 2), l));
      const double expected = ck * cl * radial * angular;
      CHECK(std::abs(a(flat_index(2, {k, 1}), flat_index(2, {l, 1})) - expected) < 1e-12);
    }
}

TEST_CASE("assembly does not depend on the thread count") {
  auto v = from_function([](std::span<const double> x) { return std::exp(x[0]) * (1 + x[1] * x[2]); });
  const auto spec = TruncationSpec::for_degree(6);
  const Matrix a1 = assemble(v, 3, spec, 1);
  const Matrix a4 = assemble(v, 3, spec, 4);
  const Matrix a3 = assemble(v, 3, spec, 3);
  bool same = true;
  for (std::size_t i = 0; i < a1.data().size(); ++i) same = same && a1.data()[i] == a4.data()[i] && a1.data()[i] == a3.data()[i];
  CHECK(same);
}

TEST_CASE("spectra") {
  auto zero = from_function([](std::span<const double>) { return 0.0; });
  for (const auto& e : spectrum(zero, 2, TruncationSpec::for_degree(5)).entries) CHECK(e.value == 0.0);
  const auto s = spectrum(GeneralSymbol::lift(RadialSymbol::power(1, 1)), 2, TruncationSpec::for_degree(10));
  CHECK(s.provenance == Provenance::galerkin);
  std::vector<double> expected;
  for (int k = 0; k <= 10; ++k)
    for (int l = 0; l < (k ? 2 : 1); ++l) expected.push_back(1.0 / (2 * k + 3));
  REQUIRE(s.entries.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(s.entries[i].value - expected[i]) < 1e-9);
  // Trace identity for a non-radial symbol.
  auto mixed = from_function([](std::span<const double> x) { return (1 - std::hypot(x[0], x[1])) + 0.3 * (1 + x[0] / 2); });
  const auto spec = TruncationSpec::for_degree(9);
  const Matrix a = assemble(mixed, 2, spec);
  double trace = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) trace += a(i, i);
  CHECK(trace == doctest::Approx(rho_integral(mixed, 2, spec)).epsilon(1e-8));
}

TEST_CASE("finite section matches the radial spectrum") {
  for (int d : {2, 3}) {
    const auto v = RadialSymbol::sampled({0.0, 0.4, 0.9}, {0.2, 1.0, 0.0});
    const int K = 12;
    const auto g = spectrum(GeneralSymbol::lift(v), d, TruncationSpec::for_degree(K));
    const auto r = radial_spectrum(v, d, K);
    std::vector<double> expanded;
    for (const auto& e : r.entries)
      for (Count m = 0; m < e.multiplicity; ++m) expanded.push_back(e.value);
    REQUIRE(expanded.size() == g.entries.size());
    for (std::size_t i = 0; i < expanded.size(); ++i) CHECK(std::abs(expanded[i] - g.entries[i].value) < 1e-9);
  }
}

TEST_CASE("counting on sections") {
  const Spectrum id = spectrum_of(Matrix::identity(9), 2);
  CHECK(counting_galerkin(id, 0.5) == 9);
  CHECK(counting_galerkin(id, 1.0) == 0);
  CHECK(counting_galerkin(id, 0.5, Sign::minus) == 0);
  const auto step = RadialSymbol::step(1, 0.5);
  const auto s = spectrum(GeneralSymbol::lift(step), 2, TruncationSpec::for_degree(10));
  for (double lambda : {0.2, 0.05, 0.01, 0.001})
    CHECK(counting_galerkin(s, lambda) == counting(step, 2, Threshold::from_value(lambda)));
  CHECK(counting_galerkin(s, 0.01) == 5);
}

TEST_CASE("Schatten norms of sections") {
  const Spectrum id = spectrum_of(Matrix::identity(16), 3);
  CHECK(schatten_galerkin(id, 1.0) == doctest::Approx(16.0));
  CHECK(schatten_galerkin(id, 2.0, true) == doctest::Approx(4.0));
  const auto step = RadialSymbol::step(1, 0.5);
  const int K = 12;
  const auto s = spectrum(GeneralSymbol::lift(step), 3, TruncationSpec::for_degree(K));
  for (double p : {1.0, 2.0, 3.5}) CHECK(std::abs(schatten_galerkin(s, p) - schatten_radial(step, 3, p, false, K).value) < 1e-9);
  for (double p : {1.5, 2.0}) CHECK(std::abs(schatten_galerkin(s, p, true) - schatten_radial(step, 3, p, true, K).value) < 1e-9);
  auto v = from_function([](std::span<const double> x) { return std::sin(3 * x[0]) + x[1]; });
  const auto sv = spectrum(v, 2, TruncationSpec::for_degree(8));
  CHECK(schatten_galerkin(sv, 2.0) <= schatten_galerkin(sv, 1.0));
  CHECK_THROWS_AS(schatten_galerkin(sv, 1.0, true), std::invalid_argument);
}

TEST_CASE("eigenvalues stay in the range of the symbol") {
  auto v = from_function([](std::span<const double> x) { return std::cos(4 * x[0]) * std::exp(x[1]); });
  const auto spec = TruncationSpec::for_degree(10);
  const TensorGrid grid = TensorGrid::for_symbol(v, 2, spec);
  const auto values = grid.sample(v);
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  for (const auto& e : spectrum(v, 2, spec).entries) {
    CHECK(e.value >= lo - 1e-9);
    CHECK(e.value <= hi + 1e-9);
  }
}

TEST_CASE("Schatten bounds by the symbol norm") {
  const auto spec = TruncationSpec::for_degree(10);
  auto power = GeneralSymbol::lift(RadialSymbol::power(1, 1));
  const auto p1 = bound_check_p3(power, 2, spec, 1.0, false);
  CHECK(p1.pass);
  CHECK(p1.lhs == doctest::Approx(p1.rhs).epsilon(1e-8));
  const auto p2 = bound_check_p3(power, 2, spec, 2.0, false);
  CHECK(p2.pass);
  CHECK(p2.lhs < p2.rhs * 0.99);
  for (double p : {1.5, 2.0}) CHECK(bound_check_p3(power, 2, spec, p, true).pass);
  auto half = from_function([](std::span<const double>) { return 0.5; });
  const auto s = spectrum(half, 2, spec);
  CHECK(std::abs(s.entries.front().value) == doctest::Approx(0.5).epsilon(1e-12));
  auto negative = from_function([](std::span<const double> x) { return x[0]; });
  CHECK_THROWS_AS(bound_check_p3(negative, 2, spec, 2.0, false), std::invalid_argument);
  const std::vector<double> vals{2.0, 1.0, 1.0}, mass{1.0, 1.0, 2.0};
  // Level 2 carries mass 1, level 1 mass 4.
  CHECK(weak_lp_norm(vals, mass, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("Weyl inequalities") {
  Matrix a(6, 6);
  for (int i = 0; i < 6; ++i) a(i, i) = i - 2.5;
  CHECK(weyl_check(a, Matrix(6, 6)).pass());
  const auto r = weyl_random(30, 10, 10, 42);
  CHECK(r.checks == 10 * 2 * 100);
  CHECK(r.pass());
  const auto spec = TruncationSpec::for_degree(8);
  const Matrix p = assemble(GeneralSymbol::lift(RadialSymbol::power(1, 1)), 2, spec);
  const Matrix s = assemble(GeneralSymbol::lift(RadialSymbol::step(0.5, 0.5)), 2, spec);
  CHECK(weyl_check(p, s).pass());
}

TEST_CASE("matrix dump") {
  std::ostringstream out;
  write_matrix_csv(out, Matrix::identity(3), 2, 1);
  CHECK(out.str() == "# harmotop matrix d=2 K=1 n=3\n1,0,0\n0,1,0\n0,0,1\n");
}
