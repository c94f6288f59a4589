#pragma once

// Perception dynamics. With a single population the common perception moves
// toward the cheating it induces; with insiders and outsiders both
// perceptions move toward the realized cheating of the random-matching
// mixture:
//
//   ds1/dt = delta (s - s1),  ds0/dt = delta (s - s0).
//
// Integration uses classical fixed-step RK4. The right-hand side has kinks
// where the max/min operators switch branches, so adaptive stepping buys
// little.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "trustdyn/model.hpp"

namespace trustdyn {

/// Raised when an operation needs the three-equilibrium structure.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when more than one rest point lies within the classification
/// tolerance of a state.
class AmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PopulationState {
  double t = 0.0;
  double s1 = 0.0;      // insiders' perceived responsive cheating
  double s0 = 0.0;      // outsiders' perceived responsive cheating
  double lambda = 0.0;  // outsider share, fixed along a trajectory
};

enum class LimitLabel { Good, Unstable, Bad, MaxTimeExceeded };

std::string_view to_string(LimitLabel label);

struct ClassifiedLimit {
  LimitLabel label = LimitLabel::MaxTimeExceeded;
  double value = 0.0;     // terminal common perception
  double residual = 0.0;  // |s - s1| + |s0 - s1| at the terminal state
};

struct TrajectorySample {
  double t;
  double s1;
  double s0;
  double s;  // realized cheating
};

struct IntegratorConfig {
  double step = 1e-2;
  double t_max = 1e3;
  double tol = 1e-10;          // convergence threshold on the residuals
  int hold_steps = 10;         // consecutive converged steps required
  std::size_t stride = 10;     // record every stride-th step
  double classify_tol = 1e-6;  // distance to the nearest rest point

  /// step = min(1e-2, 1e-1 / delta), t_max = 1e3 / delta.
  static IntegratorConfig defaults(const ModelParams& params);
};

struct Trajectory {
  ModelParams params;
  PopulationState initial;
  std::vector<TrajectorySample> samples;
  ClassifiedLimit terminal;
};

/// Realized responsive cheating when insiders (share 1 - lambda) perceive s1
/// and outsiders (share lambda) perceive s0, under random matching of
/// proposers and receivers.
double realized_mixture(double s1, double s0, double lambda,
                        const ModelParams& params);

Trajectory integrate(const PopulationState& initial, const ModelParams& params,
                     const IntegratorConfig& config);

struct GapSample {
  double t;
  double gap;  // s0 - s1
};

/// s0(t) - s1(t) along the samples; decays like exp(-delta t).
std::vector<GapSample> perception_gap(const Trajectory& trajectory);

/// Sign of realized_cheating(s_p) - s_p: -1, 0 or +1. Throws RegimeError
/// unless the parameters give the Tripartite or Boundary regime.
int flow_direction(double s_p, const ModelParams& params);

/// Labels a (near-)rest state by its nearest equilibrium. Requires
/// |s0 - s1| < tol. Unstable additionally needs |realized - s1| < tol.
/// Throws AmbiguityError when two rest points lie within tol and
/// std::domain_error when none does.
ClassifiedLimit classify_limit(const PopulationState& terminal,
                               const ModelParams& params, double tol);

/// Insiders at the good equilibrium, outsiders at the bad one. Throws
/// RegimeError when s_b does not exist.
PopulationState invasion_preset(const ModelParams& params, double lambda);

/// Insiders at the bad equilibrium, outsiders at the good one.
PopulationState counter_invasion_preset(const ModelParams& params,
                                        double lambda);

/// Header `t,s1,s0,s`, one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

}  // namespace trustdyn
