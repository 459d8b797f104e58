#pragma once

#include <span>

#include "harmotop/symbols.hpp"

namespace harmotop {

/// Partial sum over degrees <= K of the reproducing kernel of the harmonic
/// Bergman space of the unit ball. Throws std::domain_error outside B_1.
double reproducing_kernel(int d, std::span<const double> x, std::span<const double> y, int K);

/// Diagonal of the truncated kernel, sum_k (2k + d) m_k |x|^{2k} / |S^{d-1}|.
double density_rho(int d, std::span<const double> x, int K);

/// 1 - |x| and |x - y| + (1 - |x|) + (1 - |y|).
double boundary_distance(std::span<const double> x);
double separation(std::span<const double> x, std::span<const double> y);

/// int_{B_1} V rho_K dx on the tensor grid of `spec`. The result is checked
/// against a refined grid and QuadratureDivergence is thrown when the two
/// differ by more than 1e-6 relative.
double rho_integral(const GeneralSymbol& V, int d, const TruncationSpec& spec);
/// Radial form: sum_{k <= K} m_k mu_k.
double rho_integral(const RadialSymbol& v, int d, int K);

/// rho_K(x)^{-1} int R_K(x, y)^2 V(y) dy, with the same refinement check.
double berezin_transform(const GeneralSymbol& V, int d, std::span<const double> x, const TruncationSpec& spec);
/// Radial closed form: sum_k (2k+d) m_k |x|^{2k} mu_k / sum_k (2k+d) m_k |x|^{2k}.
double berezin_transform(const RadialSymbol& v, int d, std::span<const double> x, int K);

/// ceil(40 / (1 - max_radius)), the degree at which |x|^{2k} has decayed.
int suggest_truncation(double max_radius);

}  // namespace harmotop
