#include "trustdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "trustdyn/detail/formulas.hpp"
#include "trustdyn/equilibria.hpp"
#include "trustdyn/format.hpp"

namespace trustdyn {

namespace {

constexpr double kStallFlowTol = 1e-10;

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
  }
}

double mixture_unchecked(double s1, double s0, double lambda, double theta,
                         double q) {
  using detail::clamp_unit;
  const double f1 = detail::social_cost(s1, theta, q);
  const double f0 = detail::social_cost(s0, theta, q);
  const double x1 = detail::optimal_offer_from_cost(f1);
  const double x0 = detail::optimal_offer_from_cost(f0);
  const double z11 = clamp_unit(x1 - f1);
  const double z10 = clamp_unit(x1 - f0);
  const double z01 = clamp_unit(x0 - f1);
  const double z00 = clamp_unit(x0 - f0);
  const double in = 1.0 - lambda;
  return in * in * z11 + lambda * in * (z10 + z01) + lambda * lambda * z00;
}

struct Rates {
  double d1;
  double d0;
};

struct RestPoint {
  double value;
  LimitLabel label;
};

std::vector<RestPoint> rest_points(const ModelParams& params) {
  const EquilibriumSet eq = equilibrium_set(params);
  std::vector<RestPoint> points;
  if (eq.s_interior) points.push_back({*eq.s_interior, LimitLabel::Bad});
  if (eq.s_g) points.push_back({*eq.s_g, LimitLabel::Good});
  if (eq.regime == Regime::Tripartite && eq.s_u && *eq.s_u != eq.s_g.value_or(-1.0)) {
    points.push_back({*eq.s_u, LimitLabel::Unstable});
  }
  if (eq.s_b) points.push_back({*eq.s_b, LimitLabel::Bad});
  return points;
}

}  // namespace

std::string_view to_string(LimitLabel label) {
  switch (label) {
    case LimitLabel::Good: return "Good";
    case LimitLabel::Unstable: return "Unstable";
    case LimitLabel::Bad: return "Bad";
    case LimitLabel::MaxTimeExceeded: return "MaxTimeExceeded";
  }
  return "?";
}

IntegratorConfig IntegratorConfig::defaults(const ModelParams& params) {
  IntegratorConfig config;
  config.step = std::min(1e-2, 1e-1 / params.delta());
  config.t_max = 1e3 / params.delta();
  return config;
}

double realized_mixture(double s1, double s0, double lambda,
                        const ModelParams& params) {
  require_unit(s1, "s1");
  require_unit(s0, "s0");
  require_unit(lambda, "lambda");
  return mixture_unchecked(s1, s0, lambda, params.theta(), params.q());
}

Trajectory integrate(const PopulationState& initial, const ModelParams& params,
                     const IntegratorConfig& config) {
  require_unit(initial.s1, "s1");
  require_unit(initial.s0, "s0");
  require_unit(initial.lambda, "lambda");
  if (!(initial.t >= 0.0)) throw std::domain_error("t must be nonnegative");
  if (!(config.step > 0.0) || !(config.t_max > 0.0) || !(config.tol > 0.0) ||
      config.hold_steps < 1 || config.stride < 1 ||
      !(config.classify_tol > 0.0)) {
    throw std::invalid_argument("invalid integrator configuration");
  }

  const double theta = params.theta();
  const double q = params.q();
  const double delta = params.delta();
  const double lambda = initial.lambda;
  const double h = config.step;

  auto rates = [&](double s1, double s0) {
    const double s = mixture_unchecked(s1, s0, lambda, theta, q);
    return Rates{delta * (s - s1), delta * (s - s0)};
  };

  Trajectory traj{params, initial, {}, {}};
  double s1 = initial.s1;
  double s0 = initial.s0;
  double s = mixture_unchecked(s1, s0, lambda, theta, q);
  traj.samples.push_back({initial.t, s1, s0, s});

  const auto max_steps =
      static_cast<std::size_t>(std::ceil(config.t_max / h - 1e-9));
  int hold = 0;
  bool converged = false;
  std::size_t n = 0;
  double t = initial.t;
  while (n < max_steps) {
    const Rates k1 = rates(s1, s0);
    const Rates k2 = rates(s1 + 0.5 * h * k1.d1, s0 + 0.5 * h * k1.d0);
    const Rates k3 = rates(s1 + 0.5 * h * k2.d1, s0 + 0.5 * h * k2.d0);
    const Rates k4 = rates(s1 + h * k3.d1, s0 + h * k3.d0);
    s1 += h / 6.0 * (k1.d1 + 2.0 * k2.d1 + 2.0 * k3.d1 + k4.d1);
    s0 += h / 6.0 * (k1.d0 + 2.0 * k2.d0 + 2.0 * k3.d0 + k4.d0);
    ++n;
    t = initial.t + static_cast<double>(n) * h;
    s = mixture_unchecked(s1, s0, lambda, theta, q);

    const bool settled = std::max(std::abs(s - s1), std::abs(s - s0)) <
                             config.tol &&
                         std::abs(s0 - s1) < config.tol;
    hold = settled ? hold + 1 : 0;
    converged = hold >= config.hold_steps;
    if (n % config.stride == 0 || converged) {
      traj.samples.push_back({t, s1, s0, s});
    }
    if (converged) break;
  }
  if (traj.samples.back().t != t) traj.samples.push_back({t, s1, s0, s});

  const PopulationState terminal{t, s1, s0, lambda};
  const double residual = std::abs(s - s1) + std::abs(s0 - s1);
  ClassifiedLimit limit{LimitLabel::MaxTimeExceeded, s1, residual};
  if (converged) {
    try {
      limit = classify_limit(terminal, params, config.classify_tol);
    } catch (const std::domain_error&) {
      // Settled away from every rest point: leave it unresolved.
    }
  } else if (std::abs(s0 - s1) < config.classify_tol &&
             std::max(std::abs(s - s1), std::abs(s - s0)) < kStallFlowTol) {
    // Stalled at the repelling rest point past t_max.
    for (const RestPoint& p : rest_points(params)) {
      if (p.label == LimitLabel::Unstable &&
          std::abs(s1 - p.value) <= config.classify_tol) {
        limit.label = LimitLabel::Unstable;
      }
    }
  }
  traj.terminal = limit;
  return traj;
}

std::vector<GapSample> perception_gap(const Trajectory& trajectory) {
  if (trajectory.samples.empty()) {
    throw std::invalid_argument("trajectory has no samples");
  }
  std::vector<GapSample> gaps;
  gaps.reserve(trajectory.samples.size());
  for (const TrajectorySample& x : trajectory.samples) {
    gaps.push_back({x.t, x.s0 - x.s1});
  }
  return gaps;
}

int flow_direction(double s_p, const ModelParams& params) {
  const EquilibriumSet eq = equilibrium_set(params);
  if (eq.regime != Regime::Tripartite && eq.regime != Regime::Boundary) {
    throw RegimeError("flow_direction requires the Tripartite or Boundary "
                      "regime, got " + std::string(to_string(eq.regime)));
  }
  const double d = realized_cheating(s_p, params) - s_p;
  return (d > 0.0) - (d < 0.0);
}

ClassifiedLimit classify_limit(const PopulationState& terminal,
                               const ModelParams& params, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  require_unit(terminal.s1, "s1");
  require_unit(terminal.s0, "s0");
  require_unit(terminal.lambda, "lambda");
  if (!(std::abs(terminal.s0 - terminal.s1) < tol)) {
    throw std::domain_error("perceptions have not merged: |s0 - s1| >= tol");
  }
  const double s = mixture_unchecked(terminal.s1, terminal.s0, terminal.lambda,
                                     params.theta(), params.q());
  const double value = terminal.s1;

  const std::vector<RestPoint> points = rest_points(params);
  const RestPoint* nearest = nullptr;
  for (const RestPoint& p : points) {
    if (std::abs(value - p.value) > tol) continue;
    if (nearest != nullptr) {
      throw AmbiguityError("more than one rest point within tolerance of " +
                           format_number(value));
    }
    nearest = &p;
  }
  if (nearest == nullptr) {
    throw std::domain_error("no rest point within tolerance of " +
                            format_number(value));
  }
  ClassifiedLimit limit{nearest->label, value,
                        std::abs(s - terminal.s1) +
                            std::abs(terminal.s0 - terminal.s1)};
  if (limit.label == LimitLabel::Unstable && !(std::abs(s - value) < tol)) {
    throw std::domain_error("state near the unstable point is not at rest");
  }
  return limit;
}

PopulationState invasion_preset(const ModelParams& params, double lambda) {
  require_unit(lambda, "lambda");
  const EquilibriumSet eq = equilibrium_set(params);
  if (!eq.s_b || !eq.s_g) {
    throw RegimeError("invasion preset needs good and bad equilibria");
  }
  return {0.0, *eq.s_g, *eq.s_b, lambda};
}

PopulationState counter_invasion_preset(const ModelParams& params,
                                        double lambda) {
  PopulationState state = invasion_preset(params, lambda);
  std::swap(state.s1, state.s0);
  return state;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,s1,s0,s\n";
  for (const TrajectorySample& x : trajectory.samples) {
    os << format_number(x.t) << ',' << format_number(x.s1) << ','
       << format_number(x.s0) << ',' << format_number(x.s) << '\n';
  }
}

}  // namespace trustdyn
