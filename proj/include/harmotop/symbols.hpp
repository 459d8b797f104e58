#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace harmotop {

class RadialSymbol;

/// v(r) = b on [0, c], 0 on (c, 1).
struct StepProfile {
  double b = 0.0;
  double c = 0.5;
};

/// v(r) = a (1 - r)^gamma. The public factory requires a > 0; a negative
/// amplitude only arises from negation.
struct PowerProfile {
  double a = 1.0;
  double gamma = 1.0;
};

/// Piecewise-linear interpolation of (r_i, v_i), constant beyond the ends.
struct SampledProfile {
  std::vector<double> r;
  std::vector<double> v;
};

struct SumProfile {
  std::vector<RadialSymbol> parts;
};

using RadialVariant = std::variant<StepProfile, PowerProfile, SampledProfile, SumProfile>;

/// Radial profile v on [0, 1); the symbol is V(x) = v(|x|).
class RadialSymbol {
 public:
  static RadialSymbol step(double b, double c);
  static RadialSymbol power(double a, double gamma);
  static RadialSymbol sampled(std::vector<double> r, std::vector<double> v);
  static RadialSymbol sum(std::vector<RadialSymbol> parts);
  static RadialSymbol constant(double value);

  const RadialVariant& profile() const { return *node_; }
  double operator()(double r) const;
  RadialSymbol negated() const;

  /// Radii where v or its derivative jumps (step edges, sample nodes).
  std::vector<double> breaks() const;

  /// Descriptor in the CLI grammar. Sampled profiles are written inline
  /// as `sampled:[r,v; r,v; ...]`.
  std::string describe() const;

 private:
  explicit RadialSymbol(RadialVariant v);
  std::shared_ptr<const RadialVariant> node_;
};

struct BoundaryMeta {
  double gamma = 1.0;
  /// Boundary trace a0 on the unit sphere.
  std::function<double(std::span<const double>)> a0;
};

/// A real symbol on the unit ball of R^d, d in {2, 3}.
struct GeneralSymbol {
  std::function<double(std::span<const double>)> eval;
  std::optional<BoundaryMeta> boundary;
  /// Radii across which V is not smooth; quadrature panels are split there.
  std::vector<double> radial_breaks;
  /// Optional values on the nodes of a specific tensor grid (in grid order).
  /// When present they take precedence over `eval` on a grid of that size.
  std::optional<std::vector<double>> node_values;
  std::string label;

  static GeneralSymbol lift(const RadialSymbol& v);
  double operator()(std::span<const double> x) const;
};

/// Degree cutoff and quadrature orders.
struct TruncationSpec {
  int K = 0;
  int n_r = 8;
  int n_ang = 2;

  /// Smallest orders meeting the exactness requirements for degree K.
  static TruncationSpec for_degree(int K);
  /// Throws std::invalid_argument unless n_ang >= 2K + 2, n_r >= K + 8,
  /// K >= 0 and d in {2, 3}.
  void validate(int d) const;
};

/// Product quadrature on the unit ball: radial Gauss panels times an angular
/// rule (trapezoid on the circle, Gauss x trapezoid on the sphere). Weights
/// include the r^{d-1} Jacobian.
class TensorGrid {
 public:
  TensorGrid(int d, const TruncationSpec& spec, std::vector<double> radial_breaks = {},
             std::optional<double> boundary_gamma = std::nullopt);
  static TensorGrid for_symbol(const GeneralSymbol& V, int d, const TruncationSpec& spec);

  int dimension() const { return d_; }
  std::size_t size() const { return radial_nodes_.size() * angular_weights_.size(); }
  std::size_t radial_size() const { return radial_nodes_.size(); }
  std::size_t angular_size() const { return angular_weights_.size(); }

  double radius(std::size_t i_r) const { return radial_nodes_[i_r]; }
  double radial_weight(std::size_t i_r) const { return radial_weights_[i_r]; }
  std::span<const double> direction(std::size_t i_a) const {
    return {angular_points_.data() + i_a * d_, static_cast<std::size_t>(d_)};
  }
  double angular_weight(std::size_t i_a) const { return angular_weights_[i_a]; }

  /// Node n = i_r * angular_size() + i_a.
  std::vector<double> point(std::size_t n) const;
  double weight(std::size_t n) const;

  /// Symbol values at every node, in node order.
  std::vector<double> sample(const GeneralSymbol& V) const;

 private:
  int d_;
  std::vector<double> radial_nodes_;
  std::vector<double> radial_weights_;  // includes r^{d-1}
  std::vector<double> angular_points_;  // d coordinates per node
  std::vector<double> angular_weights_;
};

/// Runs body(i) for i in [0, n) on up to `threads` threads. Each index is
/// handled exactly once; callers write to disjoint slots so results do not
/// depend on the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace harmotop
