#include "trustdyn/detail/formulas.hpp"
#include "trustdyn/kernels.hpp"

namespace trustdyn::kernels::scalar {

void social_cost(std::span<const double> s, double theta, double q,
                 std::span<double> out) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = detail::social_cost(s[i], theta, q);
  }
}

void fixed_point_residual(std::span<const double> s, double theta, double q,
                          std::span<double> out) {
  const double threshold = detail::s_star(theta, q);
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i] = detail::realized_cheating(s[i], theta, q, threshold) - s[i];
  }
}

void proposer_payoff(std::span<const double> x, double s, double theta,
                     double q, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = detail::proposer_payoff(x[i], s, theta, q);
  }
}

}  // namespace trustdyn::kernels::scalar
