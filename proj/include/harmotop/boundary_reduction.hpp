#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "harmotop/count.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/numerics.hpp"
#include "harmotop/symbols.hpp"

namespace harmotop {

/// Radial profile of the harmonic extension of a degree-k boundary harmonic:
/// r^k.
double harmonic_extension_profile(int k, double r);

/// |x|^k psi_{k,l}(x / |x|), the harmonic extension of psi_{k,l}.
double harmonic_extension(int d, BasisIndex idx, std::span<const double> x);

/// Eigenvalue of J = G*G on degree-k boundary harmonics: 1 / (2k + d).
double j_eigenvalue(int d, long long k);

/// Eigenvalue of the Dirichlet-to-Neumann map on degree-k harmonics: k.
double dtn_eigenvalue(int d, long long k);

/// Per-degree scalars; all couplings between different (k, l) vanish.
struct DiagonalBoundary {
  std::vector<double> per_degree;
};

/// Dense matrix in the degree-major boundary harmonic basis.
struct DenseBoundary {
  Matrix matrix;
};

struct BoundaryOperator {
  int d = 2;
  int K = 0;
  std::variant<DiagonalBoundary, DenseBoundary> data;

  bool diagonal() const { return std::holds_alternative<DiagonalBoundary>(data); }
  /// Expanded M_K x M_K matrix.
  Matrix to_matrix() const;
};

/// J_V = G* V G: entries int V |x|^{k+k'} psi psi' dx.
BoundaryOperator assemble_JV(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads = 1);
/// Radial symbols: diagonal with mu_k / (2k + d).
BoundaryOperator assemble_JV(const RadialSymbol& v, int d, int K);

/// D^{-1/2} J_V D^{-1/2} with D the diagonal of J.
BoundaryOperator reduced_operator(const BoundaryOperator& jv);
BoundaryOperator reduced_operator(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads = 1);

/// Coefficients of G D^{-1} G* u in the extension basis |x|^k psi_{k,l},
/// degrees <= spec.K, with G* u computed by grid quadrature.
std::vector<double> projection_coefficients(const std::function<double(std::span<const double>)>& u, int d,
                                            const TruncationSpec& spec);
/// Evaluates sum_i c_i |x|^{k_i} psi_i(x / |x|).
double evaluate_extension(int d, std::span<const double> coefficients, std::span<const double> x);

struct SymbolOrderResult {
  /// Richardson estimate of lim k^gamma mu_k from k_max/4, k_max/2, k_max.
  double estimate = 0.0;
  /// 2^{-gamma} Gamma(gamma + 1) a.
  double expected = 0.0;
  /// k_max^gamma mu_{k_max} without extrapolation.
  double raw = 0.0;
  double error() const;
};

SymbolOrderResult symbol_order_check(double gamma, double a, int d, long long k_max);

struct HormanderResult {
  /// Pinned two-term fit N(E) = C E^{d-1} + B E^{d-2}.
  double coefficient = 0.0;
  /// N(E) / E^{d-1} at the largest E.
  double point_ratio = 0.0;
  double expected = 0.0;
  std::vector<double> energies;
  std::vector<Count> counts;
};

/// Counts degrees with mu_k^{-1/gamma} < E (multiplicities m_k) for the
/// power symbol a (1 - r)^gamma on an increasing grid of E (at least 4).
HormanderResult hormander_counting_check(double gamma, double a, int d, std::span<const double> energies);

}  // namespace harmotop
