#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "harmotop/count.hpp"
#include "harmotop/numerics.hpp"
#include "harmotop/radial_toeplitz.hpp"
#include "harmotop/symbols.hpp"

namespace harmotop {

/// int V(x) f(k_i, |x|) f(k_j, |x|) psi_i(x^) psi_j(x^) dx over the tensor grid
/// for all basis pairs of degree <= spec.K, where f is `radial_factor`.
Matrix assemble_with_radial_factor(const GeneralSymbol& V, int d, const TruncationSpec& spec,
                                   const std::function<double(int, double)>& radial_factor, int threads = 1);

/// Finite section of T_V on degrees <= spec.K: entries int V phi_i phi_j
/// over the tensor grid. The result is exactly symmetric and independent of
/// the thread count.
Matrix assemble(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads = 1);

/// Eigenvalues of a symmetric matrix as a Spectrum (multiplicity 1 each,
/// sorted by decreasing absolute value, provenance galerkin).
Spectrum spectrum_of(const Matrix& section, int K);
Spectrum spectrum(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads = 1);

/// Number of entries with +-e > lambda, multiplicities included.
Count counting_galerkin(const Spectrum& s, double lambda, Sign sign = Sign::plus);

/// (sum |e|^p)^{1/p}, or sup_j j^{1/p} s_j when weak.
double schatten_galerkin(const Spectrum& s, double p, bool weak = false);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Compares the section's Schatten norm with the L^p norm of V against
/// rho_K dx (weak: sup_t t rho_K({V > t})^{1/p} from the grid level sets).
/// V must be nonnegative on the grid.
BoundCheck bound_check_p3(const GeneralSymbol& V, int d, const TruncationSpec& spec, double p, bool weak,
                          int threads = 1);

/// Weak L^p quasinorm of nonnegative node values with masses w_i:
/// max_i v_i (sum_{v_j >= v_i} w_j)^{1/p}.
double weak_lp_norm(std::span<const double> values, std::span<const double> masses, double p);

struct WeylReport {
  long long checks = 0;
  long long violations = 0;
  bool pass() const { return violations == 0; }
};

/// n(s1 + s2; A + B) <= n(s1; A) + n(s2; B) for both signs on a grid of
/// grid x grid thresholds covering the spectra.
WeylReport weyl_check(const Matrix& a, const Matrix& b, int grid = 10);

/// weyl_check over `trials` random symmetric n x n pairs.
WeylReport weyl_random(int n, int trials, int grid, std::uint64_t seed);

/// Row-major CSV with the header `# harmotop matrix d=<d> K=<K> n=<rows>`.
void write_matrix_csv(std::ostream& out, const Matrix& m, int d, int K);

}  // namespace harmotop
