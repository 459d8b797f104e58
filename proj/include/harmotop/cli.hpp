#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmotop/symbols.hpp"

namespace harmotop::cli {

/// Malformed configuration or symbol descriptor; exit code 2.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// lo:hi[:count]
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  bool operator==(const GridSpec&) const = default;
};

struct ExperimentConfig {
  std::string command;
  int d = 2;
  std::string symbol;
  std::optional<int> K;
  std::optional<int> n_r;
  std::optional<int> n_ang;
  /// Single threshold, kept as typed so it can be echoed verbatim.
  std::optional<std::string> lambda;
  /// Linear grid in ln lambda.
  std::optional<GridSpec> lnlambda;
  /// Geometric grid of energies.
  std::optional<GridSpec> energies;
  std::optional<double> p;
  bool weak = false;
  std::optional<double> eps;
  bool optimal_eps = false;
  std::optional<double> lambda1;
  std::string model = "log-power";
  std::string sign = "plus";
  std::vector<std::vector<double>> points;
  bool galerkin = false;
  std::optional<long long> k_max;
  std::optional<std::string> matrix_path;
  std::string output;
  std::string format = "csv";
  int threads = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

/// A parsed descriptor. `general` is always usable on the tensor grid;
/// `radial` is set for step/power/sampled/sum descriptors. `grid` carries
/// the orders a general:@file symbol was sampled on.
struct ParsedSymbol {
  std::optional<RadialSymbol> radial;
  GeneralSymbol general;
  std::optional<TruncationSpec> grid;
};

/// Grammar: step:b=<f>,c=<f> | power:a=<f>,gamma=<f> | sampled:@<csv> |
/// sampled:[r,v; r,v; ...] | sum:[<desc>; <desc> ...] | general:@<json>.
/// Throws SchemaError with the failing position.
ParsedSymbol parse_symbol(const std::string& descriptor, int d);

GridSpec parse_grid(const std::string& text, const std::string& option, int default_count);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

/// Executes one experiment, writing the artifact to `out` (or to
/// config.output). Returns the process exit code.
int run_config(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace harmotop::cli
