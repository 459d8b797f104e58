#include "harmotop/galerkin_toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "harmotop/harmonic_basis.hpp"
#include "harmotop/kernel_berezin.hpp"

namespace harmotop {

Matrix assemble(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads) {
  return assemble_with_radial_factor(
      V, d, spec, [d](int k, double r) { return std::sqrt(2.0 * k + d) * std::pow(r, k); }, threads);
}

Matrix assemble_with_radial_factor(const GeneralSymbol& V, int d, const TruncationSpec& spec,
                                   const std::function<double(int, double)>& radial_factor, int threads) {
  spec.validate(d);
  const TensorGrid grid = TensorGrid::for_symbol(V, d, spec);
  const auto values = grid.sample(V);
  const std::size_t n = static_cast<std::size_t>(cumulative_multiplicity(d, spec.K));
  const std::size_t n_ang = grid.angular_size();

  std::vector<int> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = basis_index(d, i).k;
  // Harmonics at every angular node, node-major.
  std::vector<double> harmonics(n_ang * n);
  for (std::size_t a = 0; a < n_ang; ++a) {
    const auto h = harmonics_upto(d, spec.K, grid.direction(a));
    std::copy(h.begin(), h.end(), harmonics.begin() + static_cast<std::ptrdiff_t>(a * n));
  }

  // One shell contribution per radial node, upper triangle only.
  auto shell = [&](std::size_t i_r, Matrix& out) {
    const double r = grid.radius(i_r);
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = radial_factor(degree[i], r);
    std::vector<double> weighted(n);
    for (std::size_t a = 0; a < n_ang; ++a) {
      const double w = grid.angular_weight(a) * values[i_r * n_ang + a];
      if (w == 0.0) continue;
      const double* h = harmonics.data() + a * n;
      for (std::size_t i = 0; i < n; ++i) weighted[i] = w * h[i];
      for (std::size_t i = 0; i < n; ++i) {
        double* row = &out(i, 0);
        const double wi = weighted[i];
        for (std::size_t j = i; j < n; ++j) row[j] += wi * h[j];
      }
    }
    const double wr = grid.radial_weight(i_r);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) out(i, j) *= wr * scale[i] * scale[j];
  };

  // Shells are computed in waves and added in radial order, so the sum is
  // the same for every thread count.
  Matrix total(n, n);
  const std::size_t wave = static_cast<std::size_t>(std::max(1, threads));
  std::vector<Matrix> parts(wave);
  for (std::size_t start = 0; start < grid.radial_size(); start += wave) {
    const std::size_t count = std::min(wave, grid.radial_size() - start);
    parallel_for(count, threads, [&](std::size_t t) {
      parts[t] = Matrix(n, n);
      shell(start + t, parts[t]);
    });
    for (std::size_t t = 0; t < count; ++t)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) total(i, j) += parts[t](i, j);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) total(i, j) = total(j, i);
  return total;
}

Spectrum spectrum_of(const Matrix& section, int K) {
  Spectrum out;
  out.K = K;
  out.provenance = Provenance::galerkin;
  for (double e : symmetric_eigen(section)) out.entries.push_back({e, 1});
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const SpectrumEntry& x, const SpectrumEntry& y) { return std::abs(x.value) > std::abs(y.value); });
  return out;
}

Spectrum spectrum(const GeneralSymbol& V, int d, const TruncationSpec& spec, int threads) {
  return spectrum_of(assemble(V, d, spec, threads), spec.K);
}

Count counting_galerkin(const Spectrum& s, double lambda, Sign sign) {
  Count n = 0;
  for (const auto& e : s.entries)
    if ((sign == Sign::plus ? e.value : -e.value) > lambda) n += e.multiplicity;
  return n;
}

double schatten_galerkin(const Spectrum& s, double p, bool weak) {
  if (weak ? !(p > 1.0) : !(p >= 1.0)) throw std::invalid_argument("schatten: need p >= 1 (strong) or p > 1 (weak)");
  std::vector<std::pair<double, Count>> sv;
  for (const auto& e : s.entries) sv.push_back({std::abs(e.value), e.multiplicity});
  std::stable_sort(sv.begin(), sv.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (weak) {
    double best = 0.0;
    Count j = 0;
    for (const auto& [v, m] : sv) {
      j += m;
      best = std::max(best, std::pow(to_double(j), 1.0 / p) * v);
    }
    return best;
  }
  const double top = sv.empty() ? 0.0 : sv.front().first;
  if (top == 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& [v, m] : sv) sum += to_double(m) * std::pow(v / top, p);
  return top * std::pow(sum, 1.0 / p);
}

double weak_lp_norm(std::span<const double> values, std::span<const double> masses, double p) {
  if (values.size() != masses.size()) throw std::invalid_argument("weak_lp_norm: size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  double best = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    // Ties share one level set.
    std::size_t j = i;
    const double level = values[order[i]];
    while (j < order.size() && values[order[j]] == level) mass += masses[order[j++]];
    if (level > 0.0) best = std::max(best, level * std::pow(mass, 1.0 / p));
    i = j;
  }
  return best;
}

BoundCheck bound_check_p3(const GeneralSymbol& V, int d, const TruncationSpec& spec, double p, bool weak,
                          int threads) {
  spec.validate(d);
  if (weak ? !(p > 1.0) : !(p >= 1.0)) throw std::invalid_argument("bound check: need p >= 1 (strong) or p > 1 (weak)");
  const TensorGrid grid = TensorGrid::for_symbol(V, d, spec);
  const auto values = grid.sample(V);
  for (double v : values)
    if (v < 0.0) throw std::invalid_argument("bound check: the symbol must be nonnegative");
  BoundCheck out;
  out.lhs = schatten_galerkin(spectrum(V, d, spec, threads), p, weak);
  if (weak) {
    std::vector<double> masses(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
      std::vector<double> x(d, 0.0);
      x[0] = grid.radius(n / grid.angular_size());
      masses[n] = grid.weight(n) * density_rho(d, x, spec.K);
    }
    out.rhs = weak_lp_norm(values, masses, p);
  } else {
    GeneralSymbol powered = V;
    if (V.eval) {
      auto f = V.eval;
      powered.eval = [f, p](std::span<const double> x) { return std::pow(f(x), p); };
    }
    if (V.node_values) {
      powered.node_values = *V.node_values;
      for (double& v : *powered.node_values) v = std::pow(v, p);
    }
    out.rhs = std::pow(rho_integral(powered, d, spec), 1.0 / p);
  }
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-6);
  return out;
}

namespace {

Count count_above(const std::vector<double>& ascending, double s) {
  return static_cast<Count>(ascending.end() - std::upper_bound(ascending.begin(), ascending.end(), s));
}

}  // namespace

WeylReport weyl_check(const Matrix& a, const Matrix& b, int grid) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("weyl_check: size mismatch");
  if (grid < 1) throw std::invalid_argument("weyl_check: grid must be >= 1");
  WeylReport report;
  for (int sign : {1, -1}) {
    Matrix sa = a, sb = b;
    for (double& x : sa.data()) x *= sign;
    for (double& x : sb.data()) x *= sign;
    const auto ea = symmetric_eigen(sa);
    const auto eb = symmetric_eigen(sb);
    const auto eab = symmetric_eigen(sa + sb);
    auto top = [](const std::vector<double>& e) { return e.empty() ? 0.0 : std::max(std::abs(e.front()), std::abs(e.back())); };
    const double ra = std::max(top(ea), 1e-300), rb = std::max(top(eb), 1e-300);
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        // Thresholds spread over (0, spectral radius]; the interior points
        // avoid landing exactly on eigenvalues.
        const double s1 = ra * (i + 0.5) / grid;
        const double s2 = rb * (j + 0.5) / grid;
        ++report.checks;
        if (count_above(eab, s1 + s2) > count_above(ea, s1) + count_above(eb, s2)) ++report.violations;
      }
  }
  return report;
}

WeylReport weyl_random(int n, int trials, int grid, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  WeylReport total;
  auto random_symmetric = [&] {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = normal(gen);
    return m;
  };
  for (int t = 0; t < trials; ++t) {
    const Matrix a = random_symmetric();
    const Matrix b = random_symmetric();
    const auto r = weyl_check(a, b, grid);
    total.checks += r.checks;
    total.violations += r.violations;
  }
  return total;
}

void write_matrix_csv(std::ostream& out, const Matrix& m, int d, int K) {
  out << "# harmotop matrix d=" << d << " K=" << K << " n=" << m.rows() << "\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace harmotop
