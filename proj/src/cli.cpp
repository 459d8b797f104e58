#include "harmotop/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "harmotop/boundary_reduction.hpp"
#include "harmotop/errors.hpp"
#include "harmotop/galerkin_toeplitz.hpp"
#include "harmotop/harmonic_basis.hpp"
#include "harmotop/kernel_berezin.hpp"
#include "harmotop/krein_counting.hpp"
#include "harmotop/numerics.hpp"
#include "harmotop/radial_toeplitz.hpp"

namespace harmotop::cli {

using json = nlohmann::ordered_json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json count_json(Count n) {
  if (n <= static_cast<Count>(std::numeric_limits<long long>::max())) return static_cast<long long>(n);
  return to_string(n);
}

// ---------------------------------------------------------------------------
// Symbol descriptors

class DescriptorParser {
 public:
  DescriptorParser(const std::string& text, int d) : s_(text), d_(d) {}

  ParsedSymbol parse() {
    ParsedSymbol out = descriptor(true);
    skip_space();
    if (pos_ != s_.size()) fail("unexpected trailing text");
    return out;
  }

 private:
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    throw SchemaError("symbol descriptor error at position " + std::to_string(at + 1) + ": " + what + "\n  " + s_ +
                      "\n  " + std::string(at, ' ') + "^");
  }
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  double number() {
    skip_space();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    if (!std::isfinite(v)) fail("number must be finite");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string path() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ';' && s_[pos_] != ']') ++pos_;
    std::string p = s_.substr(start, pos_ - start);
    while (!p.empty() && std::isspace(static_cast<unsigned char>(p.back()))) p.pop_back();
    if (p.empty()) fail_at(start, "expected a file path");
    return p;
  }

  struct Value {
    double v;
    std::size_t at;
  };

  std::map<std::string, Value> keys(const std::vector<std::string>& names) {
    std::map<std::string, Value> out;
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      const std::string key = identifier();
      if (key.empty()) fail("expected a key");
      if (std::find(names.begin(), names.end(), key) == names.end()) fail_at(at, "unknown key '" + key + "'");
      if (out.count(key)) fail_at(at, "duplicate key '" + key + "'");
      expect('=');
      skip_space();
      const std::size_t value_at = pos_;
      out[key] = {number(), value_at};
      if (!peek(',')) break;
      ++pos_;
    }
    for (const auto& n : names)
      if (!out.count(n)) fail("missing key '" + n + "'");
    return out;
  }

  template <class F>
  RadialSymbol checked(std::size_t at, F&& make) {
    try {
      return make();
    } catch (const std::invalid_argument& e) {
      fail_at(at, e.what());
    }
  }

  ParsedSymbol from_radial(RadialSymbol v) {
    ParsedSymbol p;
    p.general = GeneralSymbol::lift(v);
    p.radial = std::move(v);
    return p;
  }

  ParsedSymbol descriptor(bool top) {
    skip_space();
    const std::size_t start = pos_;
    const std::string kind = identifier();
    if (kind.empty()) fail("expected a symbol kind (step, power, sampled, sum, general)");
    expect(':');
    if (kind == "step") {
      auto kv = keys({"b", "c"});
      return from_radial(checked(kv["c"].at, [&] { return RadialSymbol::step(kv["b"].v, kv["c"].v); }));
    }
    if (kind == "power") {
      auto kv = keys({"a", "gamma"});
      const std::size_t at = kv["a"].v <= 0.0 ? kv["a"].at : kv["gamma"].at;
      return from_radial(checked(at, [&] { return RadialSymbol::power(kv["a"].v, kv["gamma"].v); }));
    }
    if (kind == "sampled") {
      skip_space();
      const std::size_t at = pos_;
      if (peek('@')) {
        ++pos_;
        const std::string file = path();
        auto [r, v] = read_samples(file);
        return from_radial(checked(at, [&] { return RadialSymbol::sampled(r, v); }));
      }
      expect('[');
      std::vector<double> r, v;
      for (;;) {
        r.push_back(number());
        expect(',');
        v.push_back(number());
        if (peek(';')) {
          ++pos_;
          continue;
        }
        expect(']');
        break;
      }
      return from_radial(checked(at, [&] { return RadialSymbol::sampled(r, v); }));
    }
    if (kind == "sum") {
      expect('[');
      std::vector<RadialSymbol> parts;
      for (;;) {
        skip_space();
        const std::size_t at = pos_;
        ParsedSymbol part = descriptor(false);
        if (!part.radial) fail_at(at, "only radial symbols can be summed");
        parts.push_back(*part.radial);
        if (peek(';')) {
          ++pos_;
          continue;
        }
        if (peek(']')) {
          ++pos_;
          break;
        }
        fail("expected ';' or ']'");
      }
      return from_radial(RadialSymbol::sum(std::move(parts)));
    }
    if (kind == "general") {
      if (!top) fail_at(start, "general symbols cannot be nested");
      expect('@');
      return read_general(path());
    }
    fail_at(start, "unknown symbol kind '" + kind + "'");
  }

  static std::pair<std::vector<double>, std::vector<double>> read_samples(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open sampled profile '" + file + "'");
    std::vector<double> r, v;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream fields(line);
      double a, b;
      if (!(fields >> a >> b)) {
        if (r.empty() && std::isalpha(static_cast<unsigned char>(line[first]))) continue;  // header
        throw SchemaError(file + ":" + std::to_string(line_no) + ": expected two numeric columns r,v");
      }
      r.push_back(a);
      v.push_back(b);
    }
    if (r.empty()) throw SchemaError(file + ": no samples");
    return {r, v};
  }

  ParsedSymbol read_general(const std::string& file) const {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open general symbol '" + file + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw SchemaError(file + ": " + e.what());
    }
    auto need_int = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_number_integer()) throw SchemaError(file + ": field '" + key + "' must be an integer");
      return j[key].get<int>();
    };
    if (need_int("d") != d_)
      throw SchemaError(file + ": symbol is sampled for d=" + std::to_string(j["d"].get<int>()) + " but --d is " +
                        std::to_string(d_));
    TruncationSpec spec{need_int("K"), need_int("n_r"), need_int("n_ang")};
    try {
      spec.validate(d_);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(file + ": " + e.what());
    }
    auto numbers = [&](const char* key) {
      std::vector<double> out;
      if (!j.contains(key)) return out;
      if (!j[key].is_array()) throw SchemaError(file + ": field '" + key + "' must be an array of numbers");
      for (const auto& x : j[key]) {
        if (!x.is_number()) throw SchemaError(file + ": field '" + key + "' must be an array of numbers");
        out.push_back(x.get<double>());
      }
      return out;
    };
    if (!j.contains("values")) throw SchemaError(file + ": field 'values' is required");
    ParsedSymbol p;
    p.general.node_values = numbers("values");
    p.general.radial_breaks = numbers("breaks");
    p.general.label = "general:@" + file;
    std::optional<double> gamma;
    if (j.contains("gamma")) {
      if (!j["gamma"].is_number() || !(j["gamma"].get<double>() > 0.0))
        throw SchemaError(file + ": field 'gamma' must be a positive number");
      gamma = j["gamma"].get<double>();
      BoundaryMeta meta;
      meta.gamma = *gamma;
      if (j.contains("a0")) {
        if (!j["a0"].is_number()) throw SchemaError(file + ": field 'a0' must be a number");
        const double a0 = j["a0"].get<double>();
        meta.a0 = [a0](std::span<const double>) { return a0; };
      }
      p.general.boundary = meta;
    }
    const TensorGrid grid(d_, spec, p.general.radial_breaks, gamma);
    if (p.general.node_values->size() != grid.size())
      throw SchemaError(file + ": " + std::to_string(p.general.node_values->size()) + " values given, the grid has " +
                        std::to_string(grid.size()) + " nodes (see `harmotop grid`)");
    p.grid = spec;
    return p;
  }

  const std::string& s_;
  int d_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Reports

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct Report {
  std::vector<std::string> formulas;
  std::vector<std::string> notes;
  std::vector<Table> tables;
  json summary = json::object();
};

std::string cell_text(const json& v) {
  if (v.is_string()) {
    const std::string text = v.get<std::string>();
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char ch : text) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return quoted + "\"";
  }
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const Report& r) {
  out << "# harmotop " << cfg.command << " d=" << cfg.d;
  if (!cfg.symbol.empty()) out << " symbol=" << cfg.symbol;
  out << "\n";
  for (const auto& f : r.formulas) out << "# " << f << "\n";
  for (const auto& n : r.notes) out << "# note: " << n << "\n";
  for (const auto& t : r.tables) {
    if (r.tables.size() > 1) out << "# table " << t.name << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << "\n";
    }
  }
  for (const auto& [key, value] : r.summary.items()) out << "# summary " << key << "=" << cell_text(value) << "\n";
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["d"] = c.d;
  j["symbol"] = c.symbol;
  if (c.K) j["K"] = *c.K;
  if (c.n_r) j["n_r"] = *c.n_r;
  if (c.n_ang) j["n_ang"] = *c.n_ang;
  if (c.lambda) j["lambda"] = *c.lambda;
  auto grid = [](const GridSpec& g) { return json{{"lo", g.lo}, {"hi", g.hi}, {"count", g.count}}; };
  if (c.lnlambda) j["lnlambda"] = grid(*c.lnlambda);
  if (c.energies) j["E"] = grid(*c.energies);
  if (c.p) j["p"] = *c.p;
  j["weak"] = c.weak;
  if (c.eps) j["eps"] = *c.eps;
  j["optimal_eps"] = c.optimal_eps;
  if (c.lambda1) j["lambda1"] = *c.lambda1;
  j["model"] = c.model;
  j["sign"] = c.sign;
  j["points"] = c.points;
  j["galerkin"] = c.galerkin;
  if (c.k_max) j["kmax"] = *c.k_max;
  if (c.matrix_path) j["matrix"] = *c.matrix_path;
  j["output"] = c.output;
  j["format"] = c.format;
  j["threads"] = c.threads;
  return j;
}

void write_json(std::ostream& out, const ExperimentConfig& cfg, const Report& r) {
  json results;
  json tables = json::object();
  for (const auto& t : r.tables) tables[t.name] = {{"columns", t.columns}, {"rows", t.rows}};
  results["tables"] = tables;
  results["summary"] = r.summary;
  results["notes"] = r.notes;
  json envelope;
  envelope["config"] = config_json(cfg);
  envelope["results"] = results;
  envelope["provenance"] = {{"equations", r.formulas}};
  out << envelope.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Experiment helpers

struct Context {
  const ExperimentConfig& cfg;
  ParsedSymbol symbol;
  bool has_symbol = false;
};

TruncationSpec truncation(const Context& ctx, int default_K) {
  const auto& c = ctx.cfg;
  TruncationSpec spec;
  if (ctx.symbol.grid) {
    spec = *ctx.symbol.grid;
    if (c.K) spec.K = *c.K;
    if ((c.n_r && *c.n_r != spec.n_r) || (c.n_ang && *c.n_ang != spec.n_ang))
      throw SchemaError("--nr/--nang differ from the orders the general symbol was sampled on");
  } else {
    spec.K = c.K.value_or(default_K);
    spec.n_r = c.n_r.value_or(spec.K + 8);
    spec.n_ang = c.n_ang.value_or(2 * spec.K + 2);
  }
  try {
    spec.validate(c.d);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return spec;
}

const RadialSymbol& require_radial(const Context& ctx) {
  if (!ctx.symbol.radial) throw SchemaError("'" + ctx.cfg.command + "' needs a radial symbol (step, power, sampled, sum)");
  return *ctx.symbol.radial;
}

Sign sign_of(const ExperimentConfig& c) { return c.sign == "minus" ? Sign::minus : Sign::plus; }

// Thresholds as (label cell, ln lambda), in the order given.
std::vector<std::pair<json, double>> thresholds(const ExperimentConfig& c, std::string& column) {
  std::vector<std::pair<json, double>> out;
  if (c.lambda) {
    column = "lambda";
    char* end = nullptr;
    const double v = std::strtod(c.lambda->c_str(), &end);
    if (end == c.lambda->c_str() || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
      throw SchemaError("--lambda must be a positive number, got '" + *c.lambda + "'");
    out.push_back({*c.lambda, std::log(v)});
    return out;
  }
  if (c.lnlambda) {
    column = "ln_lambda";
    const auto& g = *c.lnlambda;
    for (int i = 0; i < g.count; ++i) {
      const double l = g.count == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.count - 1);
      out.push_back({l, l});
    }
    return out;
  }
  throw SchemaError("'" + c.command + "' needs --lambda or --lnlambda");
}

std::vector<double> energies(const ExperimentConfig& c) {
  std::vector<double> out;
  const auto& g = *c.energies;
  for (int i = 0; i < g.count; ++i) {
    if (i == 0 || i == g.count - 1)
      out.push_back(i == 0 ? g.lo : g.hi);
    else
      out.push_back(std::exp(std::log(g.lo) + (std::log(g.hi) - std::log(g.lo)) * i / (g.count - 1)));
  }
  return out;
}

// Coefficient of the expected counting law, when the profile determines it.
std::optional<double> expected_constant(const RadialSymbol& v, int d, FitModel model) {
  if (model == FitModel::power) {
    const double gamma = power_exponent(v);
    if (gamma <= 0.0) return std::nullopt;
    double a = 0.0;
    std::function<void(const RadialSymbol&)> walk = [&](const RadialSymbol& s) {
      if (const auto* p = std::get_if<PowerProfile>(&s.profile())) {
        if (p->gamma == gamma) a += p->a;
      } else if (const auto* sum = std::get_if<SumProfile>(&s.profile())) {
        for (const auto& part : sum->parts) walk(part);
      }
    };
    walk(v);
    if (!(a > 0.0)) return std::nullopt;
    return power_constant(d, gamma, a);
  }
  if (const auto* s = std::get_if<StepProfile>(&v.profile())) {
    if (s->b > 0.0) return step_constant(d, s->c);
  }
  if (const auto* s = std::get_if<SampledProfile>(&v.profile())) {
    // Support radius of a profile vanishing near the boundary.
    if (s->v.back() != 0.0) return std::nullopt;
    std::size_t last = 0;
    for (std::size_t i = 0; i < s->v.size(); ++i)
      if (s->v[i] != 0.0) last = i + 1;
    if (last == 0 || last >= s->r.size()) return std::nullopt;
    return step_constant(d, s->r[last]);
  }
  return std::nullopt;
}

double sup_abs(const RadialSymbol& v) {
  return std::visit(overloaded{
                        [](const StepProfile& s) { return std::abs(s.b); },
                        [](const PowerProfile& p) { return std::abs(p.a); },
                        [](const SampledProfile& s) {
                          double m = 0.0;
                          for (double x : s.v) m = std::max(m, std::abs(x));
                          return m;
                        },
                        [](const SumProfile& s) {
                          double m = 0.0;
                          for (const auto& part : s.parts) m += sup_abs(part);
                          return m;
                        },
                    },
                    v.profile());
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_spectrum(const Context& ctx) {
  const auto& c = ctx.cfg;
  Report r;
  const TruncationSpec spec = truncation(ctx, 10);
  if (c.matrix_path) {
    std::ofstream m(*c.matrix_path);
    if (!m) throw SchemaError("cannot write matrix file '" + *c.matrix_path + "'");
    write_matrix_csv(m, assemble(ctx.symbol.general, c.d, spec, c.threads), c.d, spec.K);
    r.notes.push_back("finite-section matrix written to " + *c.matrix_path);
  }
  if (ctx.symbol.radial && !c.galerkin) {
    r.formulas.push_back("mu_k = (2k+d) int_0^1 v(r) r^(2k+d-1) dr, multiplicity m_k");
    Table t{"spectrum", {"degree", "eigenvalue", "multiplicity"}, {}};
    struct Row {
      int k;
      double mu;
    };
    std::vector<Row> rows;
    for (int k = 0; k <= spec.K; ++k) rows.push_back({k, log_mu(*ctx.symbol.radial, c.d, k).value()});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return std::abs(a.mu) > std::abs(b.mu); });
    for (const auto& row : rows) t.rows.push_back({row.k, row.mu, count_json(multiplicity(c.d, row.k))});
    r.tables.push_back(std::move(t));
    r.summary["provenance"] = "exact-radial";
  } else {
    r.formulas.push_back("eigenvalues of the finite section A_ij = int V phi_i phi_j dx over degrees <= K");
    const Spectrum s = spectrum(ctx.symbol.general, c.d, spec, c.threads);
    Table t{"spectrum", {"index", "eigenvalue", "multiplicity"}, {}};
    for (std::size_t i = 0; i < s.entries.size(); ++i) t.rows.push_back({i + 1, s.entries[i].value, 1});
    r.tables.push_back(std::move(t));
    r.summary["provenance"] = "galerkin";
  }
  r.summary["K"] = spec.K;
  r.summary["total"] = count_json(cumulative_multiplicity(c.d, spec.K));
  return r;
}

Report cmd_counting(const Context& ctx) {
  const auto& c = ctx.cfg;
  Report r;
  std::string column;
  const auto th = thresholds(c, column);
  const std::string name = c.sign == "minus" ? "n_minus" : "n_plus";
  Table t{"counting", {column, name}, {}};
  if (ctx.symbol.radial && !c.galerkin) {
    r.formulas.push_back(name + "(lambda) = sum of m_k over degrees k with +-mu_k > lambda (strict)");
    std::vector<double> logs;
    for (const auto& x : th) logs.push_back(x.second);
    const auto counts = counting_many(*ctx.symbol.radial, c.d, logs, sign_of(c));
    for (std::size_t i = 0; i < th.size(); ++i) t.rows.push_back({th[i].first, count_json(counts[i])});
    r.summary["provenance"] = "exact-radial";
  } else {
    r.formulas.push_back(name + "(lambda) = number of finite-section eigenvalues with +-e > lambda");
    const TruncationSpec spec = truncation(ctx, 10);
    r.notes.push_back("finite-section counts; for V >= 0 they are lower bounds for the full operator");
    const Spectrum s = spectrum(ctx.symbol.general, c.d, spec, c.threads);
    for (const auto& [label, l] : th) t.rows.push_back({label, count_json(counting_galerkin(s, std::exp(l), sign_of(c)))});
    r.summary["provenance"] = "galerkin";
    r.summary["K"] = spec.K;
  }
  r.tables.push_back(std::move(t));
  return r;
}

Report cmd_asymptotics(const Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialSymbol& v = require_radial(ctx);
  if (!c.lnlambda) throw SchemaError("'asymptotics' needs --lnlambda LO:HI[:N]");
  FitModel model;
  if (c.model == "log-power")
    model = FitModel::log_power;
  else if (c.model == "power")
    model = FitModel::power;
  else
    throw SchemaError("--model must be log-power or power");
  std::string column;
  auto th = thresholds(c, column);
  std::vector<double> logs;
  for (const auto& x : th) logs.push_back(x.second);
  std::sort(logs.begin(), logs.end(), std::greater<>());
  const FitResult fit = asymptotic_fit(v, c.d, logs, model);
  Report r;
  if (model == FitModel::log_power)
    r.formulas.push_back("n_+(lambda) ~ C |ln lambda|^(d-1), C = 2^(2-d) / ((d-1)! |ln c|^(d-1))");
  else
    r.formulas.push_back("n_+(lambda) ~ C lambda^(-(d-1)/gamma), C = 2^(2-d)/(d-1)! (a Gamma(gamma+1))^((d-1)/gamma)");
  r.formulas.push_back("pinned fit n_+ / x^e = C + B x^(-s); free fit slope of ln n_+ against ln x");
  Table t{"counts", {"ln_lambda", "n_plus", "scaled"}, {}};
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double x = model == FitModel::power ? -logs[i] : std::log(-logs[i]);
    t.rows.push_back({logs[i], count_json(fit.counts[i]), to_double(fit.counts[i]) * std::exp(-fit.pinned_exponent * x)});
  }
  r.tables.push_back(std::move(t));
  r.summary["model"] = c.model;
  r.summary["exponent"] = fit.exponent;
  r.summary["exponent_expected"] = fit.pinned_exponent;
  r.summary["coefficient"] = fit.coefficient;
  r.summary["subleading"] = fit.subleading;
  r.summary["point_ratio"] = fit.point_ratio;
  if (auto e = expected_constant(v, c.d, model)) {
    r.summary["expected_coefficient"] = *e;
    r.summary["relative_error"] = std::abs(fit.coefficient / *e - 1.0);
  }
  return r;
}

Report cmd_berezin(const Context& ctx) {
  const auto& c = ctx.cfg;
  std::vector<std::vector<double>> points = c.points;
  if (points.empty())
    for (double rad : {0.0, 0.5, 0.9, 0.99}) {
      std::vector<double> x(c.d, 0.0);
      x[0] = rad;
      points.push_back(x);
    }
  double max_r = 0.0;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != c.d) throw SchemaError("--x points need exactly d coordinates");
    double s = 0.0;
    for (double x : p) s += x * x;
    if (!(std::sqrt(s) < 1.0)) throw SchemaError("--x points must lie inside the unit ball");
    max_r = std::max(max_r, std::sqrt(s));
  }
  Report r;
  r.formulas.push_back("Berezin transform rho_K(x)^(-1) int R_K(x,y)^2 V(y) dy");
  r.formulas.push_back("rho_K(x) = sum_(k<=K) (2k+d) m_k |x|^(2k) / |S^(d-1)|");
  Table t{"berezin", {}, {}};
  for (int i = 0; i < c.d; ++i) t.columns.push_back("x" + std::to_string(i + 1));
  t.columns.push_back("berezin");
  t.columns.push_back("rho");
  const bool radial = ctx.symbol.radial && !c.galerkin;
  const int K = radial ? c.K.value_or(suggest_truncation(max_r)) : 0;
  const TruncationSpec spec = radial ? TruncationSpec{} : truncation(ctx, 10);
  const int used_K = radial ? K : spec.K;
  for (const auto& p : points) {
    std::vector<json> row(p.begin(), p.end());
    const double b = radial ? berezin_transform(*ctx.symbol.radial, c.d, p, K) : berezin_transform(ctx.symbol.general, c.d, p, spec);
    row.push_back(b);
    row.push_back(density_rho(c.d, p, used_K));
    t.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(t));
  r.summary["K"] = used_K;
  r.summary["route"] = radial ? "radial-series" : "grid";
  return r;
}

Report cmd_schatten(const Context& ctx) {
  const auto& c = ctx.cfg;
  const double p = c.p.value_or(c.weak ? 2.0 : 1.0);
  Report r;
  r.formulas.push_back(c.weak ? "||T||_(p,w) = sup_j j^(1/p) s_j" : "||T||_p = (sum_j s_j^p)^(1/p)");
  if (ctx.symbol.radial && !c.galerkin) {
    const long long k_stop = c.K.value_or(200);
    const SchattenValue s = schatten_radial(*ctx.symbol.radial, c.d, p, c.weak, k_stop);
    Table t{"schatten", {"p", "weak", "value", "upper", "k_stop"}, {}};
    t.rows.push_back({p, c.weak, s.value, s.upper, k_stop});
    r.tables.push_back(std::move(t));
    r.notes.push_back("value sums degrees <= k_stop; upper adds a certified tail bound");
    return r;
  }
  const TruncationSpec spec = truncation(ctx, 10);
  const TensorGrid grid = TensorGrid::for_symbol(ctx.symbol.general, c.d, spec);
  const auto values = grid.sample(ctx.symbol.general);
  const bool nonnegative = std::all_of(values.begin(), values.end(), [](double x) { return x >= 0.0; });
  Table t{"schatten", {"p", "weak", "section_norm", "symbol_norm", "bound_holds"}, {}};
  if (nonnegative) {
    r.formulas.push_back(c.weak ? "bound: ||T_V||_(p,w) <= sup_t t rho({V > t})^(1/p)"
                                : "bound: ||T_V||_p <= (int V^p rho_K dx)^(1/p)");
    const BoundCheck b = bound_check_p3(ctx.symbol.general, c.d, spec, p, c.weak, c.threads);
    t.rows.push_back({p, c.weak, b.lhs, b.rhs, b.pass});
  } else {
    const double norm = schatten_galerkin(spectrum(ctx.symbol.general, c.d, spec, c.threads), p, c.weak);
    t.rows.push_back({p, c.weak, norm, nullptr, nullptr});
    r.notes.push_back("symbol changes sign; the symbol-norm bound is not evaluated");
  }
  r.tables.push_back(std::move(t));
  r.summary["K"] = spec.K;
  return r;
}

Report cmd_boundary(const Context& ctx) {
  const auto& c = ctx.cfg;
  Report r;
  r.formulas.push_back("J = G*G has eigenvalue 1/(2k+d) on degree-k harmonics; Dirichlet-to-Neumann eigenvalue k");
  r.formulas.push_back("reduced operator D^(-1/2) J_V D^(-1/2) compared with the finite section of T_V");
  const TruncationSpec spec = truncation(ctx, 8);
  const Matrix reduced = reduced_operator(ctx.symbol.general, c.d, spec, c.threads).to_matrix();
  const Matrix section = assemble(ctx.symbol.general, c.d, spec, c.threads);
  double diff = 0.0;
  for (std::size_t i = 0; i < reduced.data().size(); ++i) diff = std::max(diff, std::abs(reduced.data()[i] - section.data()[i]));
  Table red{"reduction", {"K", "size", "max_abs_difference"}, {}};
  red.rows.push_back({spec.K, reduced.rows(), diff});
  r.tables.push_back(std::move(red));
  if (ctx.symbol.radial) {
    if (const auto* p = std::get_if<PowerProfile>(&ctx.symbol.radial->profile())) {
      r.formulas.push_back("k^gamma mu_k -> 2^(-gamma) Gamma(gamma+1) a (Richardson over k_max/4, k_max/2, k_max)");
      const long long k_max = c.k_max.value_or(10000);
      const auto s = symbol_order_check(p->gamma, p->a, c.d, k_max);
      Table t{"symbol_order", {"gamma", "a", "k_max", "raw", "estimate", "expected", "error"}, {}};
      t.rows.push_back({p->gamma, p->a, k_max, s.raw, s.estimate, s.expected, s.error()});
      r.tables.push_back(std::move(t));
      if (c.energies) {
        r.formulas.push_back("N(E) = #{mu_k^(-1/gamma) < E} ~ C E^(d-1), C from the boundary integral of a0^((d-1)/gamma)");
        const auto es = energies(c);
        const auto h = hormander_counting_check(p->gamma, p->a, c.d, es);
        Table ht{"hormander", {"E", "count", "scaled"}, {}};
        for (std::size_t i = 0; i < es.size(); ++i)
          ht.rows.push_back({es[i], count_json(h.counts[i]), to_double(h.counts[i]) / std::pow(es[i], c.d - 1)});
        r.tables.push_back(std::move(ht));
        r.summary["coefficient"] = h.coefficient;
        r.summary["point_ratio"] = h.point_ratio;
        r.summary["expected_coefficient"] = h.expected;
      }
    }
  }
  return r;
}

Report cmd_krein(const Context& ctx) {
  const auto& c = ctx.cfg;
  const RadialSymbol& v = require_radial(ctx);
  Report r;
  const double lambda1 = c.lambda1.value_or(buckling_disk(1).front().value);
  const double v_sup = sup_abs(v);
  const double gamma = power_exponent(v);
  r.formulas.push_back("minus side: [n(lambda), n((1-eps) lambda) + R(eps)]");
  r.formulas.push_back("plus side: [max(0, n((1+eps) lambda) - R(eps) - C), max(0, n(lambda) - C)]");
  r.formulas.push_back("R(eps) = #{L-eigenvalues < lambda_1 + max V / eps}" +
                       std::string(c.d == 2 ? " (disk buckling values j_(k+1,m)^2)" : " (model floor(E^(d/2)))"));
  if (c.lambda || c.lnlambda) {
    std::string column;
    const auto th = thresholds(c, column);
    if (c.optimal_eps && gamma <= 0.0) throw SchemaError("--optimal-eps needs a power component in the symbol");
    const double theta = c.optimal_eps ? optimal_theta(c.d, gamma) : 0.0;
    const auto constant = expected_constant(v, c.d, FitModel::power);
    Table t{"sandwich", {column, "eps", "n_plus", "minus_lower", "minus_upper", "plus_lower", "plus_upper", "main_term"}, {}};
    for (const auto& [label, l] : th) {
      SandwichInput in;
      in.lambda = std::exp(l);
      in.eps = c.optimal_eps ? std::exp(theta * l) : c.eps.value_or(0.1);
      in.n_plus = [&](double x) { return counting(v, c.d, Threshold::from_value(x)); };
      in.remainder = [&](double e) { return remainder_model(e, v_sup, lambda1, c.d); };
      const auto minus = sandwich_minus(in);
      const auto plus = sandwich_plus(in);
      json main = nullptr;
      if (constant) main = *constant * std::exp(-(c.d - 1.0) / gamma * l);
      t.rows.push_back({label, in.eps, count_json(in.n_plus(in.lambda)), count_json(minus.lower), count_json(minus.upper),
                        count_json(plus.lower), count_json(plus.upper), main});
    }
    r.tables.push_back(std::move(t));
    if (gamma > 0.0) {
      r.summary["kappa"] = envelope_kappa(c.d);
      r.summary["remainder_exponent"] = (c.d - 1.0) * envelope_kappa(c.d) / gamma;
      if (c.optimal_eps) r.summary["theta"] = theta;
    }
  }
  if (c.energies) {
    const auto es = energies(c);
    const auto w = weyl_L_check(es);
    Table t{"buckling", {"E", "count", "scaled"}, {}};
    for (std::size_t i = 0; i < es.size(); ++i) t.rows.push_back({es[i], count_json(w.counts[i]), to_double(w.counts[i]) / es[i]});
    r.tables.push_back(std::move(t));
    r.summary["weyl_exponent"] = w.exponent;
    r.summary["weyl_coefficient"] = w.coefficient;
    r.summary["weyl_expected"] = 0.25;
  }
  if (r.tables.empty()) throw SchemaError("'krein' needs --lambda, --lnlambda or --E");
  r.summary["lambda1"] = lambda1;
  return r;
}

Report cmd_grid(const Context& ctx) {
  const auto& c = ctx.cfg;
  const TruncationSpec spec = truncation(ctx, 10);
  const TensorGrid grid = ctx.has_symbol ? TensorGrid::for_symbol(ctx.symbol.general, c.d, spec) : TensorGrid(c.d, spec);
  Report r;
  r.notes.push_back("node order of the tensor grid; a general:@file symbol lists V at these nodes in this order");
  Table t{"grid", {"index"}, {}};
  for (int i = 0; i < c.d; ++i) t.columns.push_back("x" + std::to_string(i + 1));
  t.columns.push_back("weight");
  for (std::size_t n = 0; n < grid.size(); ++n) {
    std::vector<json> row{n};
    for (double x : grid.point(n)) row.push_back(x);
    row.push_back(grid.weight(n));
    t.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(t));
  r.summary["K"] = spec.K;
  r.summary["n_r"] = spec.n_r;
  r.summary["n_ang"] = spec.n_ang;
  r.summary["nodes"] = grid.size();
  return r;
}

// Small invariant suite; each check returns (pass, detail).
Report cmd_selftest(const Context&) {
  Report r;
  Table t{"selftest", {"check", "status", "detail"}, {}};
  auto add = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    try {
      auto [ok, detail] = f();
      t.rows.push_back({name, ok ? "pass" : "FAIL", detail});
    } catch (const std::exception& e) {
      t.rows.push_back({name, "FAIL", std::string("exception: ") + e.what()});
    }
  };
  add("gauss_legendre_exactness", [] {
    const double v = gauss_legendre(10, 0.0, 1.0).integrate([](double x) { return std::pow(x, 19); });
    return std::pair{std::abs(v - 0.05) < 1e-14, fmt(v)};
  });
  add("multiplicity_running_sum", [] {
    bool ok = true;
    for (int d = 2; d <= 6; ++d)
      for (int k = 0; k <= 200; ++k) ok = ok && cumulative_multiplicity(d, k) - cumulative_multiplicity(d, k - 1) == multiplicity(d, k);
    return std::pair{ok, std::string("d<=6, k<=200")};
  });
  add("step_counting", [] {
    const Count n = counting(RadialSymbol::step(1, 0.5), 2, Threshold::from_value(0.1));
    return std::pair{n == 1, to_string(n)};
  });
  add("quadrature_vs_closed_form", [] {
    double err = 0.0;
    for (int k = 0; k <= 30; ++k)
      err = std::max(err, std::abs(mu_k(RadialSymbol::power(1, 0.5), 3, k) / mu_k_power(1, 0.5, 3, k) - 1.0));
    return std::pair{err < 1e-10, fmt(err)};
  });
  add("boundary_constant_identity", [] {
    double err = 0.0;
    for (int d = 2; d <= 5; ++d)
      for (double g : {0.5, 1.0, 2.0}) err = std::max(err, std::abs(theorem1_constant(d, g, 1.3) / power_constant(d, g, 1.3) - 1.0));
    return std::pair{err < 1e-12, fmt(err)};
  });
  add("radial_section_diagonal", [] {
    const auto v = RadialSymbol::step(1, 0.5);
    const Matrix a = assemble(GeneralSymbol::lift(v), 2, TruncationSpec::for_degree(8));
    double err = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        err = std::max(err, std::abs(a(i, j) - (i == j ? mu_k_step(1, 0.5, 2, basis_index(2, i).k) : 0.0)));
    return std::pair{err < 1e-10, fmt(err)};
  });
  add("reduced_equals_section", [] {
    GeneralSymbol V;
    V.eval = [](std::span<const double> x) { return std::exp(x[0]) + x[1] * x[1]; };
    const auto spec = TruncationSpec::for_degree(8);
    const Matrix a = reduced_operator(V, 2, spec).to_matrix();
    const Matrix b = assemble(V, 2, spec);
    double err = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) err = std::max(err, std::abs(a.data()[i] - b.data()[i]));
    return std::pair{err < 1e-10, fmt(err)};
  });
  add("trace_identity", [] {
    const auto V = GeneralSymbol::lift(RadialSymbol::step(1, 0.5));
    const double rho = rho_integral(V, 2, TruncationSpec::for_degree(40));
    return std::pair{std::abs(rho - 5.0 / 12) < 1e-6, fmt(rho)};
  });
  add("weyl_inequalities", [] {
    const auto w = weyl_random(20, 5, 10, 1);
    return std::pair{w.pass(), std::to_string(w.violations) + " violations in " + std::to_string(w.checks)};
  });
  add("first_buckling_value", [] {
    const double b = buckling_disk(1).front().value;
    return std::pair{std::abs(b - 14.68197064) < 1e-6, fmt(b)};
  });
  const bool ok = std::all_of(t.rows.begin(), t.rows.end(), [](const auto& row) { return row[1] == "pass"; });
  r.summary["status"] = ok ? "pass" : "FAIL";
  r.tables.push_back(std::move(t));
  return r;
}

const std::map<std::string, std::function<Report(const Context&)>>& commands() {
  static const std::map<std::string, std::function<Report(const Context&)>> table = {
      {"spectrum", cmd_spectrum}, {"counting", cmd_counting}, {"asymptotics", cmd_asymptotics},
      {"berezin", cmd_berezin},   {"schatten", cmd_schatten}, {"boundary", cmd_boundary},
      {"krein", cmd_krein},       {"selftest", cmd_selftest}, {"grid", cmd_grid},
  };
  return table;
}

bool needs_symbol(const std::string& command) { return command != "selftest" && command != "grid"; }

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ',')) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || !std::isfinite(v)) throw SchemaError("--x expects comma-separated numbers, got '" + text + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

ParsedSymbol parse_symbol(const std::string& descriptor, int d) {
  if (d < 2) throw SchemaError("dimension d must be >= 2");
  return DescriptorParser(descriptor, d).parse();
}

GridSpec parse_grid(const std::string& text, const std::string& option, int default_count) {
  std::vector<std::string> parts;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ':')) parts.push_back(field);
  if (parts.size() < 2 || parts.size() > 3) throw SchemaError(option + " expects LO:HI[:N], got '" + text + "'");
  auto num = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end == s.c_str() || *end != '\0' || !std::isfinite(v))
      throw SchemaError(option + ": '" + s + "' is not a number");
    return v;
  };
  GridSpec g{num(parts[0]), num(parts[1]), default_count};
  if (parts.size() == 3) {
    const double n = num(parts[2]);
    if (n < 1 || n != std::floor(n) || n > 1e7) throw SchemaError(option + ": point count must be a positive integer");
    g.count = static_cast<int>(n);
  }
  if (g.count > 1 && g.lo == g.hi) throw SchemaError(option + ": LO and HI must differ");
  return g;
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(); }

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  ExperimentConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.d = j.value("d", 2);
    c.symbol = j.value("symbol", std::string());
    if (j.contains("K")) c.K = j["K"].get<int>();
    if (j.contains("n_r")) c.n_r = j["n_r"].get<int>();
    if (j.contains("n_ang")) c.n_ang = j["n_ang"].get<int>();
    if (j.contains("lambda")) c.lambda = j["lambda"].get<std::string>();
    auto grid = [](const json& g) { return GridSpec{g.at("lo").get<double>(), g.at("hi").get<double>(), g.at("count").get<int>()}; };
    if (j.contains("lnlambda")) c.lnlambda = grid(j["lnlambda"]);
    if (j.contains("E")) c.energies = grid(j["E"]);
    if (j.contains("p")) c.p = j["p"].get<double>();
    c.weak = j.value("weak", false);
    if (j.contains("eps")) c.eps = j["eps"].get<double>();
    c.optimal_eps = j.value("optimal_eps", false);
    if (j.contains("lambda1")) c.lambda1 = j["lambda1"].get<double>();
    c.model = j.value("model", std::string("log-power"));
    c.sign = j.value("sign", std::string("plus"));
    if (j.contains("points")) c.points = j["points"].get<std::vector<std::vector<double>>>();
    c.galerkin = j.value("galerkin", false);
    if (j.contains("kmax")) c.k_max = j["kmax"].get<long long>();
    if (j.contains("matrix")) c.matrix_path = j["matrix"].get<std::string>();
    c.output = j.value("output", std::string());
    c.format = j.value("format", std::string("csv"));
    c.threads = j.value("threads", 1);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return c;
}

int run_config(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto& table = commands();
    const auto it = table.find(config.command);
    if (it == table.end()) throw SchemaError("unknown command '" + config.command + "'");
    if (config.d < 2) throw SchemaError("--d must be >= 2");
    if (config.format != "csv" && config.format != "json") throw SchemaError("--format must be csv or json");
    if (config.sign != "plus" && config.sign != "minus") throw SchemaError("--sign must be plus or minus");
    if (config.threads < 1) throw SchemaError("--threads must be >= 1");
    if (config.lambda && config.lnlambda) throw SchemaError("--lambda and --lnlambda are mutually exclusive");
    if (config.energies && !(config.energies->lo > 0.0 && config.energies->hi > config.energies->lo))
      throw SchemaError("--E needs 0 < LO < HI");
    Context ctx{config, {}, false};
    if (!config.symbol.empty()) {
      ctx.symbol = parse_symbol(config.symbol, config.d);
      ctx.has_symbol = true;
    } else if (needs_symbol(config.command)) {
      throw SchemaError("'" + config.command + "' needs --symbol");
    }
    const Report report = it->second(ctx);
    std::ofstream file;
    std::ostream* sink = &out;
    if (!config.output.empty()) {
      file.open(config.output);
      if (!file) throw SchemaError("cannot write output file '" + config.output + "'");
      sink = &file;
    }
    if (config.format == "json")
      write_json(*sink, config, report);
    else
      write_csv(*sink, config, report);
    if (config.command == "selftest" && report.summary["status"] != "pass") return 1;
    return 0;
  } catch (const SchemaError& e) {
    err << "harmotop: " << e.what() << "\n";
    return 2;
  } catch (const CertificationError& e) {
    err << "harmotop: not certified: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "harmotop: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "harmotop: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "harmotop: error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harmonic Toeplitz operators on the unit ball: spectra, counting functions, asymptotics"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path, "Run the experiment described by a JSON config (or a JSON output envelope)");

  ExperimentConfig cfg;
  std::optional<int> K, n_r, n_ang;
  std::string lambda, lnlambda, energies_text;
  std::optional<double> p, eps, lambda1;
  std::optional<long long> k_max;
  std::vector<std::string> points;
  std::string matrix_path;

  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"spectrum", "Eigenvalues: exact per degree for radial symbols, finite section otherwise"},
      {"counting", "n_+ / n_- at --lambda or over --lnlambda"},
      {"asymptotics", "Fit counting data against the log-power or power law"},
      {"berezin", "Berezin transform and kernel density at --x points"},
      {"schatten", "Schatten norms (--p, --weak) and the symbol-norm bound"},
      {"boundary", "Boundary reduction: structural identity, symbol order, boundary counting"},
      {"krein", "Sandwich bounds for the perturbed Krein Laplacian and the buckling Weyl law"},
      {"selftest", "Quick invariant suite"},
      {"grid", "Print the tensor quadrature grid (node order for general:@file symbols)"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    subs.push_back(sub);
    sub->add_option("--d", cfg.d, "Dimension")->default_val(2);
    sub->add_option("--symbol", cfg.symbol, "Symbol descriptor");
    sub->add_option("--K", K, "Truncation degree");
    sub->add_option("--nr", n_r, "Radial quadrature order");
    sub->add_option("--nang", n_ang, "Angular quadrature order");
    auto* lam = sub->add_option("--lambda", lambda, "Threshold (echoed as typed)");
    auto* lnl = sub->add_option("--lnlambda", lnlambda, "Grid LO:HI[:N] in ln lambda");
    lam->excludes(lnl);
    sub->add_option("--E", energies_text, "Energy grid LO:HI:N (geometric)");
    sub->add_option("--p", p, "Schatten exponent");
    sub->add_flag("--weak", cfg.weak, "Weak Schatten quasinorm");
    sub->add_option("--eps", eps, "Sandwich parameter in (0,1)");
    sub->add_flag("--optimal-eps", cfg.optimal_eps, "Use eps = lambda^theta with the balancing theta");
    sub->add_option("--lambda1", lambda1, "Lowest eigenvalue of L (default: first disk buckling value)");
    sub->add_option("--model", cfg.model, "log-power | power")->default_val("log-power");
    sub->add_option("--sign", cfg.sign, "plus | minus")->default_val("plus");
    sub->add_option("--x", points, "Point as comma-separated coordinates (repeatable)");
    sub->add_flag("--galerkin", cfg.galerkin, "Use the finite section even for radial symbols");
    sub->add_option("--kmax", k_max, "Largest degree for the symbol-order extrapolation");
    sub->add_option("--matrix", matrix_path, "Also write the finite-section matrix as CSV");
    sub->add_option("--output", cfg.output, "Output path (default stdout)");
    sub->add_option("--format", cfg.format, "csv | json")->default_val("csv");
    sub->add_option("--threads", cfg.threads, "Worker threads")->default_val(1);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "harmotop: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw SchemaError("cannot open config '" + config_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      ExperimentConfig from_file = config_from_json(buf.str());
      return run_config(from_file, out, err);
    }
    for (auto* sub : subs)
      if (sub->parsed()) cfg.command = sub->get_name();
    if (cfg.command.empty()) throw SchemaError("a command is required (run with --help for the list)");
    cfg.K = K;
    cfg.n_r = n_r;
    cfg.n_ang = n_ang;
    if (!lambda.empty()) cfg.lambda = lambda;
    if (!lnlambda.empty()) cfg.lnlambda = parse_grid(lnlambda, "--lnlambda", 41);
    if (!energies_text.empty()) cfg.energies = parse_grid(energies_text, "--E", 9);
    cfg.p = p;
    cfg.eps = eps;
    cfg.lambda1 = lambda1;
    cfg.k_max = k_max;
    for (const auto& s : points) cfg.points.push_back(parse_point(s));
    if (!matrix_path.empty()) cfg.matrix_path = matrix_path;
  } catch (const SchemaError& e) {
    err << "harmotop: " << e.what() << "\n";
    return 2;
  }
  return run_config(cfg, out, err);
}

}  // namespace harmotop::cli
