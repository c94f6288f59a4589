#pragma once

// Primitive functions of the trust game: social cost of cheating, the
// responsive cutoff, the proposer's optimal offer and the realized-cheating
// best response.

namespace trustdyn {

/// Primitives of the economy. Immutable once constructed.
///
/// theta weighs the social cost of cheating, q is the fraction of scoundrels
/// and delta the speed at which perceptions adjust. The constructor throws
/// std::domain_error unless theta > 0, 0 < q < 1 and delta > 0.
class ModelParams {
 public:
  ModelParams(double theta, double q, double delta = 1.0);

  double theta() const noexcept { return theta_; }
  double q() const noexcept { return q_; }
  double delta() const noexcept { return delta_; }

  ModelParams with_delta(double delta) const { return {theta_, q_, delta}; }
  ModelParams with_q(double q) const { return {theta_, q, delta_}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double theta_;
  double q_;
  double delta_;
};

/// A responsive's private cost draw z and the prevailing proportion s of
/// responsives who cheat. Both lie in [0, 1].
struct CostProfile {
  double z = 0.0;
  double s = 0.0;
};

/// f(s) = theta q / (q + (1 - q) s). Throws std::domain_error for s outside
/// [0, 1].
double social_cost(double s, const ModelParams& params);

/// z + f(s).
double total_cost(const CostProfile& profile, const ModelParams& params);

/// Private-cost cutoff below which a responsive facing offer x cheats,
/// clamped to [0, 1]. Throws std::domain_error on negative x.
double cheat_cutoff(double x, double s, const ModelParams& params);

/// Perception level at which f(s*) = 1. Negative when theta < 1, in which
/// case the proposer's interior solution is always the relevant one.
double s_star(const ModelParams& params);

/// max{f(s), 1/2 + f(s)/2}.
double optimal_offer(double s_perceived, const ModelParams& params);

/// Expected proposer payoff of offer x when responsives perceive s:
/// the probability the receiver does not cheat times x.
double proposer_payoff(double x, double s, const ModelParams& params);

/// Realized proportion of responsive cheating when the common perception is
/// s_p: 0 up to s*, 1/2 - f(s_p)/2 beyond it. Always in [0, 1/2).
double realized_cheating(double s_p, const ModelParams& params);

}  // namespace trustdyn
