#pragma once

// Command-line front end. `run` is the whole program minus main(), so tests
// drive it with argument vectors and string streams.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trustdyn/experiments.hpp"

namespace trustdyn::cli {

/// Bad flags, bad config files, or parameter combinations the library
/// rejects up front. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command {
  Equilibria,
  Flow,
  Simulate,
  LambdaStar,
  HalfwayQ,
  SweepCheating,
  SweepLambdaStar,
};

enum class OutputFormat { Csv, Json };

/// `lo:hi:n`, n evenly spaced points including both ends.
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  static Grid parse(std::string_view text);
  std::vector<double> values() const;
};

struct RunConfig {
  Command command = Command::Equilibria;
  std::optional<double> theta;
  std::optional<double> q;
  double delta = 1.0;
  std::optional<double> lambda;
  std::optional<double> s1_0;
  std::optional<double> s0_0;
  std::string preset;  // "", "invasion" or "counter-invasion"
  double step = 0.01;
  bool step_explicit = false;
  std::optional<double> t_max;
  double tol = 1e-10;
  double lambda_tol = 1e-12;
  std::optional<Grid> theta_grid;
  std::optional<Grid> q_grid;
  QMode q_mode = QMode::Fixed;
  std::string out;
  OutputFormat format = OutputFormat::Csv;
  std::size_t stride = 10;
  std::size_t points = 101;
  unsigned jobs = 1;

  /// step when given, else min(1e-2, 1e-1 / delta).
  double effective_step() const;
  /// t_max when given, else 1e3 / delta.
  double effective_t_max() const;
};

/// Reads a JSON object of run settings. Keys mirror the long flags with
/// dashes replaced by underscores (theta, q, s1_0, t_max, q_grid, ...).
/// Unknown keys and malformed JSON raise ConfigError; parse errors carry the
/// line and column.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(std::string_view text);

/// Exit status: 0 success, 2 invalid arguments, 3 runtime failure.
int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

}  // namespace trustdyn::cli
