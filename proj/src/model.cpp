#include "trustdyn/model.hpp"

#include <stdexcept>
#include <string>

#include "trustdyn/detail/formulas.hpp"

namespace trustdyn {

namespace {

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1], got " +
                            std::to_string(v));
  }
}

}  // namespace

ModelParams::ModelParams(double theta, double q, double delta)
    : theta_(theta), q_(q), delta_(delta) {
  if (!(theta > 0.0)) throw std::domain_error("theta must be positive");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie in (0, 1)");
  if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
}

double social_cost(double s, const ModelParams& params) {
  require_unit(s, "s");
  return detail::social_cost(s, params.theta(), params.q());
}

double total_cost(const CostProfile& profile, const ModelParams& params) {
  require_unit(profile.z, "z");
  return profile.z + social_cost(profile.s, params);
}

double cheat_cutoff(double x, double s, const ModelParams& params) {
  if (!(x >= 0.0)) throw std::domain_error("offer x must be nonnegative");
  return detail::clamp_unit(x - social_cost(s, params));
}

double s_star(const ModelParams& params) {
  return detail::s_star(params.theta(), params.q());
}

double optimal_offer(double s_perceived, const ModelParams& params) {
  return detail::optimal_offer_from_cost(social_cost(s_perceived, params));
}

double proposer_payoff(double x, double s, const ModelParams& params) {
  const double cutoff = cheat_cutoff(x, s, params);
  return (1.0 - ((1.0 - params.q()) * cutoff + params.q())) * x;
}

double realized_cheating(double s_p, const ModelParams& params) {
  require_unit(s_p, "s_p");
  return detail::realized_cheating(s_p, params.theta(), params.q(),
                                   s_star(params));
}

}  // namespace trustdyn
