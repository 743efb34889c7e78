#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifslab/ifs_core.hpp"
#include "ifslab/random_walks.hpp"
#include "ifslab/report.hpp"
#include "ifslab/stationary_measures.hpp"

namespace ifslab::cli {

/// A validated invocation. Parameters a command does not use keep their defaults.
struct RunConfig {
  std::string command;     // "experiment" carries its kind in `experiment`
  std::string experiment;  // sync | intermit | diverge | equi | hist2d

  std::optional<SystemParams> sys;
  std::optional<MultDepParams> multdep;
  std::optional<WalkParams> walk;

  std::uint64_t seed = 1;
  std::string out = "-";
  Format format = Format::json;
  std::string table;

  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t cap = kDefaultCap;
  std::uint64_t points = 10000;
  double eps = 0.0;
  std::vector<double> eps_grid;
  double beta = 0.5;
  int bins = 20;
  int grid = 81;
  std::optional<int> H;
  double p0 = 0.5;
  int k = 0;
  int l = 0;
  int kappa = 0;
  double z0 = 0.0;
  std::optional<double> K;
  std::string kind = "T";  // stopping rule: T | TK | S | W | V
  double xJ = 0.0;
  Word word;
  std::vector<std::uint8_t> eta;
  std::vector<double> starts;
  std::optional<double> x0, y0;
  std::vector<int> criteria;

  /// Merged key/value pairs (flags overridden by the config document).
  std::map<std::string, std::string> raw;
};

/// Thrown by parse_config for --help; carries the text to print.
struct HelpRequested {
  std::string text;
};

/// Parses an argument vector (without the program name). A --config document
/// overrides flag values. Throws UsageError for malformed input or unknown keys,
/// IoError for an unreadable config file, and PreconditionError / DomainError
/// when parameters violate the command's preconditions.
RunConfig parse_config(const std::vector<std::string>& args);

/// Flat key/value pairs from a JSON object or a TOML document; list values are
/// joined with commas.
std::map<std::string, std::string> read_config_text(const std::string& text);

/// Executes the command and returns the exit code.
int run(const RunConfig& cfg);

/// parse + run, mapping errors to exit codes with a message on stderr.
int main_entry(int argc, const char* const* argv);

}  // namespace ifslab::cli
