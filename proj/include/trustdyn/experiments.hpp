#pragma once

// Numerical exercises on top of the closed forms and the invasion dynamics:
// the minimum disrupting invasion size, the scoundrel fraction that puts the
// unstable equilibrium halfway between the stable ones, and parameter sweeps.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "trustdyn/dynamics.hpp"
#include "trustdyn/model.hpp"

namespace trustdyn {

/// An invasion probe that did not settle even after the t_max retry.
class ProbeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LambdaStarResult {
  ModelParams params;
  // Smallest probed invasion share that drives the population to s_b. Absent
  // when even lambda = 1/2 is assimilated.
  std::optional<double> lambda_star;
  double lo = 0.0;
  double hi = 0.5;
  std::map<double, LimitLabel> verdicts;

  /// No Good verdict above a Bad one.
  bool verdicts_monotone() const;
};

/// Outcome of one invasion of size lambda from the invasion preset. A
/// MaxTimeExceeded result is retried once with t_max x 10; a second failure
/// throws ProbeFailure.
LimitLabel invasion_verdict(const ModelParams& params, double lambda,
                            const IntegratorConfig& config);

/// Bisection for the minimum disrupting invasion share on [0, 1/2]. Requires
/// the Tripartite regime (RegimeError otherwise) and tol >= 1e-12.
LambdaStarResult lambda_star(const ModelParams& params, double tol = 1e-12);
LambdaStarResult lambda_star(const ModelParams& params, double tol,
                             const IntegratorConfig& config);

/// q in (0, q_hat(theta)) with s_u = s_b / 2, by bisection until the residual
/// |s_u - s_b / 2| <= tol.
double halfway_q(double theta, double tol = 1e-13);

/// One row of a sweep. Outputs keep their insertion order; an absent value is
/// written as an empty CSV cell or JSON null.
struct SweepRecord {
  double theta = 0.0;
  double q = 0.0;
  std::optional<double> lambda;
  std::vector<std::pair<std::string, std::optional<double>>> outputs;
  std::string label;
  std::string flag;  // non-empty when the record was skipped or failed

  std::optional<double> output(std::string_view name) const;
};

/// Total cheating in the worst stable equilibrium for each q: q + (1-q) s_b
/// while s_b exists, q once only the good equilibrium remains.
std::vector<SweepRecord> sweep_total_cheating(double theta,
                                              std::span<const double> q_grid);

enum class QMode { Fixed, Halfway };

struct LambdaSweepOptions {
  QMode mode = QMode::Fixed;
  double q = 0.0;  // used in Fixed mode
  double tol = 1e-12;
  double delta = 1.0;
  std::optional<double> step;  // default IntegratorConfig::defaults
  std::optional<double> t_max;
  unsigned jobs = 1;
};

/// lambda_star per theta. Records whose theta/q admit no interior
/// equilibria, or whose probes fail, are flagged instead of aborting.
/// Output order follows theta_grid regardless of jobs.
std::vector<SweepRecord> sweep_lambda_star(std::span<const double> theta_grid,
                                           const LambdaSweepOptions& options);

enum class SweepKind { TotalCheating, LambdaStar };

/// CSV with header `q,s_b,total_cheating,regime` or
/// `theta,q,lambda_star,verdict_count`.
void write_sweep_csv(std::ostream& os, SweepKind kind,
                     std::span<const SweepRecord> records);

/// Array of flat objects with the same field names as the CSV header.
nlohmann::ordered_json sweep_to_json(SweepKind kind,
                                     std::span<const SweepRecord> records);

}  // namespace trustdyn
