#include "harmotop/symbols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "harmotop/numerics.hpp"

namespace harmotop {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

RadialSymbol::RadialSymbol(RadialVariant v) : node_(std::make_shared<const RadialVariant>(std::move(v))) {}

RadialSymbol RadialSymbol::step(double b, double c) {
  if (!std::isfinite(b)) throw std::invalid_argument("step: b must be finite");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("step: c must lie in (0, 1)");
  return RadialSymbol(StepProfile{b, c});
}

RadialSymbol RadialSymbol::power(double a, double gamma) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("power: a must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("power: gamma must be positive");
  return RadialSymbol(PowerProfile{a, gamma});
}

RadialSymbol RadialSymbol::sampled(std::vector<double> r, std::vector<double> v) {
  if (r.empty() || r.size() != v.size()) throw std::invalid_argument("sampled: need matching nonempty r and v columns");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] >= 0.0 && r[i] < 1.0)) throw std::invalid_argument("sampled: radii must lie in [0, 1)");
    if (!std::isfinite(v[i])) throw std::invalid_argument("sampled: values must be finite");
    if (i > 0 && !(r[i] > r[i - 1])) throw std::invalid_argument("sampled: radii must be strictly increasing");
  }
  return RadialSymbol(SampledProfile{std::move(r), std::move(v)});
}

RadialSymbol RadialSymbol::sum(std::vector<RadialSymbol> parts) {
  if (parts.empty()) throw std::invalid_argument("sum: no terms");
  return RadialSymbol(SumProfile{std::move(parts)});
}

RadialSymbol RadialSymbol::constant(double value) { return sampled({0.0}, {value}); }

double RadialSymbol::operator()(double r) const {
  return std::visit(overloaded{
                        [r](const StepProfile& s) { return r <= s.c ? s.b : 0.0; },
                        [r](const PowerProfile& p) { return p.a * std::pow(std::max(0.0, 1.0 - r), p.gamma); },
                        [r](const SampledProfile& s) {
                          if (r <= s.r.front()) return s.v.front();
                          if (r >= s.r.back()) return s.v.back();
                          const auto it = std::upper_bound(s.r.begin(), s.r.end(), r);
                          const std::size_t i = static_cast<std::size_t>(it - s.r.begin());
                          const double t = (r - s.r[i - 1]) / (s.r[i] - s.r[i - 1]);
                          return s.v[i - 1] + t * (s.v[i] - s.v[i - 1]);
                        },
                        [r](const SumProfile& s) {
                          double total = 0.0;
                          for (const auto& p : s.parts) total += p(r);
                          return total;
                        },
                    },
                    *node_);
}

RadialSymbol RadialSymbol::negated() const {
  return std::visit(overloaded{
                        [](const StepProfile& s) { return RadialSymbol(StepProfile{-s.b, s.c}); },
                        [](const PowerProfile& p) { return RadialSymbol(PowerProfile{-p.a, p.gamma}); },
                        [](const SampledProfile& s) {
                          SampledProfile n = s;
                          for (double& x : n.v) x = -x;
                          return RadialSymbol(std::move(n));
                        },
                        [](const SumProfile& s) {
                          SumProfile n;
                          for (const auto& p : s.parts) n.parts.push_back(p.negated());
                          return RadialSymbol(std::move(n));
                        },
                    },
                    *node_);
}

std::vector<double> RadialSymbol::breaks() const {
  std::vector<double> out;
  std::visit(overloaded{
                 [&](const StepProfile& s) { out.push_back(s.c); },
                 [&](const PowerProfile&) {},
                 [&](const SampledProfile& s) {
                   // Many nodes would multiply the panel count; only short
                   // tables get exact panel splits.
                   if (s.r.size() <= 64)
                     for (double r : s.r)
                       if (r > 0.0) out.push_back(r);
                 },
                 [&](const SumProfile& s) {
                   for (const auto& p : s.parts) {
                     auto b = p.breaks();
                     out.insert(out.end(), b.begin(), b.end());
                   }
                 },
             },
             *node_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string RadialSymbol::describe() const {
  return std::visit(overloaded{
                        [](const StepProfile& s) { return "step:b=" + fmt(s.b) + ",c=" + fmt(s.c); },
                        [](const PowerProfile& p) { return "power:a=" + fmt(p.a) + ",gamma=" + fmt(p.gamma); },
                        [](const SampledProfile& s) {
                          std::string out = "sampled:[";
                          for (std::size_t i = 0; i < s.r.size(); ++i) {
                            if (i) out += "; ";
                            out += fmt(s.r[i]) + "," + fmt(s.v[i]);
                          }
                          return out + "]";
                        },
                        [](const SumProfile& s) {
                          std::string out = "sum:[";
                          for (std::size_t i = 0; i < s.parts.size(); ++i) {
                            if (i) out += "; ";
                            out += s.parts[i].describe();
                          }
                          return out + "]";
                        },
                    },
                    *node_);
}

namespace {

// Boundary decay of a radial profile: the smallest gamma among power terms,
// provided every other term vanishes near r = 1.
std::optional<BoundaryMeta> radial_boundary(const RadialSymbol& v) {
  struct Acc {
    bool ok = true;
    double gamma = 0.0;
    double a = 0.0;
    bool any = false;
  } acc;
  std::function<void(const RadialSymbol&)> walk = [&](const RadialSymbol& s) {
    std::visit(overloaded{
                   [&](const StepProfile&) {},
                   [&](const PowerProfile& p) {
                     if (!acc.any || p.gamma < acc.gamma) {
                       acc.gamma = p.gamma;
                       acc.a = p.a;
                     } else if (p.gamma == acc.gamma) {
                       acc.a += p.a;
                     }
                     acc.any = true;
                   },
                   [&](const SampledProfile& sp) {
                     if (sp.v.back() != 0.0) acc.ok = false;
                   },
                   [&](const SumProfile& sp) {
                     for (const auto& p : sp.parts) walk(p);
                   },
               },
               s.profile());
  };
  walk(v);
  if (!acc.ok || !acc.any) return std::nullopt;
  const double a = acc.a;
  return BoundaryMeta{acc.gamma, [a](std::span<const double>) { return a; }};
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

}  // namespace

GeneralSymbol GeneralSymbol::lift(const RadialSymbol& v) {
  GeneralSymbol g;
  g.eval = [v](std::span<const double> x) { return v(norm(x)); };
  g.boundary = radial_boundary(v);
  g.radial_breaks = v.breaks();
  g.label = v.describe();
  return g;
}

double GeneralSymbol::operator()(std::span<const double> x) const {
  if (!eval) throw std::invalid_argument("symbol '" + label + "' is only known on its sample grid");
  return eval(x);
}

TruncationSpec TruncationSpec::for_degree(int K) { return TruncationSpec{K, K + 8, 2 * K + 2}; }

void TruncationSpec::validate(int d) const {
  if (d != 2 && d != 3) throw std::invalid_argument("Galerkin computations support d = 2 and d = 3 only");
  if (K < 0) throw std::invalid_argument("truncation degree K must be >= 0");
  if (n_r < K + 8) throw std::invalid_argument("radial order n_r must be >= K + 8");
  if (n_ang < 2 * K + 2) throw std::invalid_argument("angular order n_ang must be >= 2K + 2");
}

TensorGrid::TensorGrid(int d, const TruncationSpec& spec, std::vector<double> radial_breaks,
                       std::optional<double> boundary_gamma)
    : d_(d) {
  spec.validate(d);
  std::vector<double> edges{0.0};
  std::sort(radial_breaks.begin(), radial_breaks.end());
  for (double b : radial_breaks)
    if (b > edges.back() + 1e-12 && b < 1.0 - 1e-12) edges.push_back(b);
  edges.push_back(1.0);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    const bool last = p + 2 == edges.size();
    // Integer exponents leave a polynomial that plain Gauss-Legendre handles.
    if (last && boundary_gamma && *boundary_gamma > 0.0 && std::floor(*boundary_gamma) != *boundary_gamma) {
      // Gauss-Jacobi absorbs (1 - r)^gamma; divide it back out of the weights.
      const double g = *boundary_gamma;
      auto rule = gauss_jacobi(spec.n_r, g, 0.0, a, b);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double r = rule.nodes[i];
        radial_nodes_.push_back(r);
        radial_weights_.push_back(rule.weights[i] / std::pow(1.0 - r, g) * std::pow(r, d - 1));
      }
    } else {
      auto rule = gauss_legendre(spec.n_r, a, b);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        radial_nodes_.push_back(rule.nodes[i]);
        radial_weights_.push_back(rule.weights[i] * std::pow(rule.nodes[i], d - 1));
      }
    }
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int n_az = spec.n_ang;
  if (d == 2) {
    for (int j = 0; j < n_az; ++j) {
      const double th = two_pi * j / n_az;
      angular_points_.push_back(std::cos(th));
      angular_points_.push_back(std::sin(th));
      angular_weights_.push_back(two_pi / n_az);
    }
  } else {
    auto polar = gauss_legendre(spec.n_ang / 2 + 1, -1.0, 1.0);
    for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
      const double t = polar.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int j = 0; j < n_az; ++j) {
        const double ph = two_pi * j / n_az;
        angular_points_.push_back(s * std::cos(ph));
        angular_points_.push_back(s * std::sin(ph));
        angular_points_.push_back(t);
        angular_weights_.push_back(polar.weights[i] * two_pi / n_az);
      }
    }
  }
}

TensorGrid TensorGrid::for_symbol(const GeneralSymbol& V, int d, const TruncationSpec& spec) {
  std::optional<double> gamma;
  if (V.boundary) gamma = V.boundary->gamma;
  return TensorGrid(d, spec, V.radial_breaks, gamma);
}

std::vector<double> TensorGrid::point(std::size_t n) const {
  const std::size_t i_r = n / angular_size();
  const std::size_t i_a = n % angular_size();
  const double r = radial_nodes_[i_r];
  std::vector<double> x(d_);
  for (int c = 0; c < d_; ++c) x[c] = r * angular_points_[i_a * d_ + c];
  return x;
}

double TensorGrid::weight(std::size_t n) const {
  return radial_weights_[n / angular_size()] * angular_weights_[n % angular_size()];
}

std::vector<double> TensorGrid::sample(const GeneralSymbol& V) const {
  if (V.node_values) {
    if (V.node_values->size() != size())
      throw std::invalid_argument("symbol '" + V.label + "' carries " + std::to_string(V.node_values->size()) +
                                  " grid samples but the quadrature grid has " + std::to_string(size()) + " nodes");
    return *V.node_values;
  }
  std::vector<double> out(size());
  for (std::size_t n = 0; n < size(); ++n) {
    const auto x = point(n);
    out[n] = V(x);
  }
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace harmotop
