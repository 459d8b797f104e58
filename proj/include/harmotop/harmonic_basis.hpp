#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "harmotop/count.hpp"

namespace harmotop {

/// (degree k, index l within the degree), 1 <= l <= multiplicity(d, k).
struct BasisIndex {
  int k = 0;
  int l = 1;
};

/// Throws std::invalid_argument unless d >= 2.
void require_dimension(int d);

/// Binomial coefficient with binom(m, n) = 0 when m < n or n < 0.
Count binomial(long long m, long long n);

/// Dimension of the space of degree-k spherical harmonics in d variables.
Count multiplicity(int d, long long k);

/// Sum of multiplicities over degrees 0..k; zero for k = -1.
Count cumulative_multiplicity(int d, long long k);

/// max over k in [k_max/2, k_max] of |M_k (d-1)! / (2 k^{d-1}) - 1| * k.
double multiplicity_asymptotic_check(int d, long long k_max);

double sphere_surface_area(int d);

/// Position of (k, l) in the degree-major enumeration, starting at 0.
std::size_t flat_index(int d, BasisIndex idx);
BasisIndex basis_index(int d, std::size_t flat);

/// Real orthonormal spherical harmonic on S^{d-1}, d in {2, 3}.
///
/// d = 2: l = 1 is cos(k theta)/sqrt(pi) (the constant 1/sqrt(2 pi) when
/// k = 0), l = 2 is sin(k theta)/sqrt(pi).
/// d = 3: l = 1 is the zonal m = 0 function; l = 2j and l = 2j + 1 are the
/// cos(j phi) and sin(j phi) harmonics built on fully normalised associated
/// Legendre functions of the polar cosine (third coordinate).
double spherical_harmonic(int d, BasisIndex idx, std::span<const double> point);

/// All harmonics of degree <= K at a unit point, degree-major.
std::vector<double> harmonics_upto(int d, int K, std::span<const double> point);

/// Sum over l of psi_{k,l}(xi) psi_{k,l}(eta) as a function of t = xi . eta.
double zonal_sum(int d, int k, double t);

/// zonal_sum(d, k, t) for k = 0..K.
std::vector<double> zonal_sums_upto(int d, int K, double t);

/// Orthonormal basis of the harmonic Bergman space of the unit ball:
/// sqrt(2k + d) |x|^k psi_{k,l}(x/|x|).
double basis_value(int d, BasisIndex idx, std::span<const double> x);

/// All basis values of degree <= K at x, degree-major.
std::vector<double> basis_values_upto(int d, int K, std::span<const double> x);

}  // namespace harmotop
