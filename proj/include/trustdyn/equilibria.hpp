#pragma once

#include <optional>
#include <string_view>

#include "trustdyn/model.hpp"

namespace trustdyn {

enum class Regime {
  UniqueInterior,  // theta < 1
  GoodOnly,        // theta >= 1, q above the threshold
  Boundary,        // q at the threshold, unstable and bad roots coincide
  Tripartite,      // theta >= 1, q below the threshold: good, unstable, bad
};

std::string_view to_string(Regime regime);

/// All rest points for one parameter set. s_g is present whenever
/// theta >= 1; s_u and s_b exactly in the Boundary and Tripartite regimes;
/// s_interior only when theta < 1.
struct EquilibriumSet {
  Regime regime = Regime::GoodOnly;
  std::optional<double> s_g;
  std::optional<double> s_u;
  std::optional<double> s_b;
  std::optional<double> s_interior;
  std::optional<double> q_hat;
  double s_star = 0.0;
  // theta == 1 exactly sits between the two classification results.
  bool theta_at_one = false;
};

struct InteriorRoots {
  double unstable;
  double bad;
};

/// Largest scoundrel fraction for which the interior equilibria exist.
/// Decreasing from 1/3 at theta = 1 towards 0. Throws std::domain_error for
/// theta < 1.
double q_hat(double theta);

/// Roots of f(s) = 1 - 2s for theta > 1, absent when q > q_hat(theta).
std::optional<InteriorRoots> interior_roots(const ModelParams& params);

/// The single positive fixed point for theta < 1.
double unique_interior_root(const ModelParams& params);

EquilibriumSet equilibrium_set(const ModelParams& params);

/// q + (1 - q) s_resp.
double total_cheating(const ModelParams& params, double s_resp);

/// s_u, separating the good basin [0, s_u) from the bad basin (s_u, 1].
std::optional<double> basin_boundary(const ModelParams& params);

}  // namespace trustdyn
