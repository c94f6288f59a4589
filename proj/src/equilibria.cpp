#include "trustdyn/equilibria.hpp"

#include <cmath>
#include <stdexcept>

#include "trustdyn/detail/formulas.hpp"

namespace trustdyn {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kDiscriminantSlack = 1e-14;

double coincident_root(double q) { return (1.0 - 3.0 * q) / (4.0 * (1.0 - q)); }

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::UniqueInterior: return "UniqueInterior";
    case Regime::GoodOnly: return "GoodOnly";
    case Regime::Boundary: return "Boundary";
    case Regime::Tripartite: return "Tripartite";
  }
  return "?";
}

double q_hat(double theta) {
  if (!(theta >= 1.0)) throw std::domain_error("q_hat requires theta >= 1");
  // (4t - 1 - 4 sqrt(t(t-1))) / (1 + 8t), rationalized: the numerator times
  // its conjugate is exactly 1 + 8t.
  return 1.0 / (4.0 * theta - 1.0 + 4.0 * std::sqrt(theta * (theta - 1.0)));
}

std::optional<InteriorRoots> interior_roots(const ModelParams& params) {
  const double theta = params.theta();
  const double q = params.q();
  if (!(theta > 1.0)) {
    throw std::domain_error("interior_roots requires theta > 1");
  }
  const double threshold = q_hat(theta);
  if (std::abs(q - threshold) <= kBoundaryTol) {
    const double r = coincident_root(q);
    return InteriorRoots{r, r};
  }
  if (q > threshold) return std::nullopt;

  double disc = (q + 1.0) * (q + 1.0) - 8.0 * theta * q * (1.0 - q);
  if (disc < 0.0) {
    if (disc < -kDiscriminantSlack) return std::nullopt;
    disc = 0.0;
  }
  const double bad = (1.0 - 3.0 * q + std::sqrt(disc)) / (4.0 * (1.0 - q));
  // Product of the roots is q(theta - 1) / (2(1 - q)); dividing avoids the
  // cancellation in 1 - 3q - sqrt(D) as q -> 0.
  const double unstable = q * (theta - 1.0) / (2.0 * (1.0 - q) * bad);
  return InteriorRoots{unstable, bad};
}

double unique_interior_root(const ModelParams& params) {
  if (!(params.theta() < 1.0)) {
    throw std::domain_error("unique_interior_root requires theta < 1");
  }
  const double q = params.q();
  // 2(1-q) s^2 - (1-3q) s + q(theta-1) = 0 has a negative constant term, so
  // exactly one root is positive.
  const double a = 2.0 * (1.0 - q);
  const double b = -(1.0 - 3.0 * q);
  const double c = q * (params.theta() - 1.0);
  const double root_d = std::sqrt(b * b - 4.0 * a * c);
  if (b <= 0.0) return (-b + root_d) / (2.0 * a);
  return (2.0 * c) / (-b - root_d);
}

EquilibriumSet equilibrium_set(const ModelParams& params) {
  const double theta = params.theta();
  const double q = params.q();
  EquilibriumSet eq;
  eq.s_star = s_star(params);

  if (theta < 1.0) {
    eq.regime = Regime::UniqueInterior;
    eq.s_interior = unique_interior_root(params);
    return eq;
  }

  eq.q_hat = q_hat(theta);
  eq.s_g = 0.0;
  if (theta == 1.0) {
    eq.theta_at_one = true;
    if (std::abs(q - *eq.q_hat) <= kBoundaryTol) {
      eq.regime = Regime::Boundary;
      eq.s_u = eq.s_b = coincident_root(q);
    } else if (q < *eq.q_hat) {
      // The constant term of the quadratic vanishes: one root merges with s_g.
      eq.regime = Regime::Tripartite;
      eq.s_u = 0.0;
      eq.s_b = (1.0 - 3.0 * q) / (2.0 * (1.0 - q));
    } else {
      eq.regime = Regime::GoodOnly;
    }
    return eq;
  }

  if (std::abs(q - *eq.q_hat) <= kBoundaryTol) {
    eq.regime = Regime::Boundary;
    eq.s_u = eq.s_b = coincident_root(q);
    return eq;
  }
  if (auto roots = interior_roots(params)) {
    eq.regime = Regime::Tripartite;
    eq.s_u = roots->unstable;
    eq.s_b = roots->bad;
  } else {
    eq.regime = Regime::GoodOnly;
  }
  return eq;
}

double total_cheating(const ModelParams& params, double s_resp) {
  if (!(s_resp >= 0.0 && s_resp <= 1.0)) {
    throw std::domain_error("s_resp must lie in [0, 1]");
  }
  return params.q() + (1.0 - params.q()) * s_resp;
}

std::optional<double> basin_boundary(const ModelParams& params) {
  return equilibrium_set(params).s_u;
}

}  // namespace trustdyn
