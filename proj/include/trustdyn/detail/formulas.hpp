#pragma once

// Unchecked scalar formulas shared by the public model functions and the
// scalar reference kernels. The AVX2 kernels replicate these operation by
// operation so that both paths round identically.

#include <algorithm>

namespace trustdyn::detail {

inline double social_cost(double s, double theta, double q) noexcept {
  return (theta * q) / (q + (1.0 - q) * s);
}

inline double s_star(double theta, double q) noexcept {
  return q * (theta - 1.0) / (1.0 - q);
}

inline double clamp_unit(double v) noexcept {
  return std::min(1.0, std::max(0.0, v));
}

inline double optimal_offer_from_cost(double f) noexcept {
  return std::max(f, 0.5 + 0.5 * f);
}

inline double realized_cheating(double s_p, double theta, double q,
                                 double s_star) noexcept {
  if (s_p <= s_star) return 0.0;
  return 0.5 - 0.5 * social_cost(s_p, theta, q);
}

inline double proposer_payoff(double x, double s, double theta,
                              double q) noexcept {
  const double cutoff = clamp_unit(x - social_cost(s, theta, q));
  return (1.0 - ((1.0 - q) * cutoff + q)) * x;
}

}  // namespace trustdyn::detail
