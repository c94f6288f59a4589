#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "trustdyn/dynamics.hpp"
#include "trustdyn/equilibria.hpp"

using namespace trustdyn;

TEST_CASE("realized_mixture reduces to the single-population map") {
  const ModelParams p(2.0, 0.05);
  for (double s1 : {0.0, 0.05, 0.2, 0.7}) {
    for (double s0 : {0.0, 0.3, 1.0}) {
      CHECK(realized_mixture(s1, s0, 0.0, p) ==
            doctest::Approx(realized_cheating(s1, p)).epsilon(1e-15));
    }
    for (double lambda : {0.0, 0.118, 0.5, 0.9}) {
      CHECK(realized_mixture(s1, s1, lambda, p) ==
            doctest::Approx(realized_cheating(s1, p)).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(realized_mixture(0.1, 0.1, 1.2, p), std::domain_error);
}

TEST_CASE("realized_mixture at the invasion state") {
  const ModelParams p(2.0, 0.05);
  const double s_b = *equilibrium_set(p).s_b;
  CHECK(s_b == doctest::Approx(0.37769341987788980).epsilon(1e-13));
  CHECK(realized_mixture(0.0, s_b, 0.118, p) ==
        doctest::Approx(0.10933500317837974).epsilon(1e-13));
}

TEST_CASE("realized_mixture relabeling symmetry") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0), theta(1.01, 5.0), q(0.001, 0.3);
  for (int i = 0; i < 1000; ++i) {
    const ModelParams p(theta(rng), q(rng));
    const double s1 = u(rng), s0 = u(rng);
    // Dyadic shares make 1 - lambda exact, so the two sides use the same
    // weights.
    const double dyadic = std::ldexp(std::floor(u(rng) * 1024.0), -10);
    CHECK(realized_mixture(s1, s0, dyadic, p) ==
          doctest::Approx(realized_mixture(s0, s1, 1.0 - dyadic, p)).epsilon(1e-15));
    const double lambda = u(rng);
    CHECK(std::abs(realized_mixture(s1, s0, lambda, p) -
                   realized_mixture(s0, s1, 1.0 - lambda, p)) <= 1e-15);
  }
}

TEST_CASE("integrate from the good rest point settles immediately") {
  const ModelParams p(2.0, 0.05);
  const Trajectory t = integrate({0.0, 0.0, 0.0, 0.3}, p, IntegratorConfig::defaults(p));
  CHECK(t.terminal.label == LimitLabel::Good);
  CHECK(t.samples.back().t < 0.2);
}

TEST_CASE("invasion of size 0.118 at theta=2, q=0.05 disrupts") {
  const ModelParams p(2.0, 0.05);
  const Trajectory t = integrate(invasion_preset(p, 0.118), p, IntegratorConfig::defaults(p));
  CHECK(t.terminal.label == LimitLabel::Bad);
  CHECK(t.terminal.value == doctest::Approx(*equilibrium_set(p).s_b).epsilon(1e-8));
  REQUIRE(t.samples.size() > 2);
  CHECK(t.samples[1].s1 > t.samples[0].s1);
  CHECK(t.samples[1].s0 < t.samples[0].s0);
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    CHECK(t.samples[i].t > t.samples[i - 1].t);
  }
}

TEST_CASE("trajectory values stay in the unit interval") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0), theta(1.05, 4.0), frac(0.05, 0.95);
  for (int i = 0; i < 30; ++i) {
    const double th = theta(rng);
    const ModelParams p(th, q_hat(th) * frac(rng));
    const Trajectory t =
        integrate({0.0, u(rng), u(rng), u(rng)}, p, IntegratorConfig::defaults(p));
    for (const auto& x : t.samples) {
      CHECK(x.s1 >= 0.0);
      CHECK(x.s1 <= 1.0);
      CHECK(x.s0 >= 0.0);
      CHECK(x.s0 <= 1.0);
      CHECK(x.s >= 0.0);
      CHECK(x.s <= 1.0);
    }
  }
}

TEST_CASE("perception gap decays exponentially") {
  const ModelParams p(2.0, 0.05);
  IntegratorConfig c = IntegratorConfig::defaults(p);
  c.step = std::log(2.0) / 1000.0;
  c.stride = 1000;
  const Trajectory t = integrate(invasion_preset(p, 0.118), p, c);
  const auto gaps = perception_gap(t);
  CHECK(gaps[0].gap == t.initial.s0 - t.initial.s1);
  REQUIRE(gaps.size() > 2);
  CHECK(gaps[1].t == doctest::Approx(std::log(2.0)));
  CHECK(std::abs(gaps[1].gap - 0.5 * gaps[0].gap) <= 1e-6);

  // Only delta * t matters.
  auto gap_at = [&](double delta, double t_end) {
    const ModelParams pd = p.with_delta(delta);
    IntegratorConfig cd;
    cd.step = 1e-3;
    cd.stride = 1;
    cd.t_max = t_end;
    const Trajectory tr = integrate(invasion_preset(pd, 0.2), pd, cd);
    return tr.samples.back().s0 - tr.samples.back().s1;
  };
  CHECK(gap_at(2.0, 1.0) == doctest::Approx(gap_at(1.0, 2.0)).epsilon(1e-8));
}

TEST_CASE("flow_direction on the three basins") {
  const ModelParams p(1.375, 0.1);
  const EquilibriumSet eq = equilibrium_set(p);
  CHECK(flow_direction(0.5 * *eq.s_u, p) == -1);
  CHECK(flow_direction(0.5 * (*eq.s_u + *eq.s_b), p) == 1);
  CHECK(flow_direction(0.5 * (*eq.s_b + 1.0), p) == -1);
  CHECK(flow_direction(0.0, p) == 0);
  CHECK_THROWS_AS(flow_direction(0.2, ModelParams(2.0, 0.3)), RegimeError);
  CHECK_THROWS_AS(flow_direction(0.2, ModelParams(0.9, 0.1)), RegimeError);
}

TEST_CASE("classify_limit") {
  const ModelParams p(2.0, 0.05);
  const EquilibriumSet eq = equilibrium_set(p);
  CHECK(classify_limit({0, 0.0, 0.0, 0.1}, p, 1e-6).label == LimitLabel::Good);
  const double b = *eq.s_b + 1e-12;
  CHECK(classify_limit({0, b, b, 0.1}, p, 1e-6).label == LimitLabel::Bad);
  const double u = *eq.s_u - 1e-12;
  CHECK(classify_limit({0, u, u, 0.1}, p, 1e-6).label == LimitLabel::Unstable);
  CHECK_THROWS_AS(classify_limit({0, 0.2, 0.2, 0.1}, p, 1e-6), std::domain_error);
  CHECK_THROWS_AS(classify_limit({0, 0.0, 0.1, 0.1}, p, 1e-6), std::domain_error);

  // s_u ~ 5e-10 sits within tol of s_g.
  const ModelParams tiny(2.0, 1e-9);
  CHECK_THROWS_AS(classify_limit({0, 0.0, 0.0, 0.1}, tiny, 1e-6), AmbiguityError);
}

TEST_CASE("presets") {
  const ModelParams p(2.0, 0.05);
  const double s_b = *equilibrium_set(p).s_b;
  const PopulationState inv = invasion_preset(p, 0.1);
  CHECK(inv.s1 == 0.0);
  CHECK(inv.s0 == s_b);
  const PopulationState counter = counter_invasion_preset(p, 0.9);
  CHECK(counter.s1 == s_b);
  CHECK(counter.s0 == 0.0);
  CHECK(counter.lambda == 0.9);
  CHECK_THROWS_AS(invasion_preset(ModelParams(2.0, 0.3), 0.1), RegimeError);
}

TEST_CASE("classification is invariant to delta and to halving the step") {
  const ModelParams base(2.0, 0.05);
  for (double lambda : {0.05, 0.1, 0.15, 0.3}) {
    const Trajectory ref = integrate(invasion_preset(base, lambda), base,
                                     IntegratorConfig::defaults(base));
    for (double delta : {0.5, 2.0}) {
      const ModelParams p = base.with_delta(delta);
      const Trajectory t =
          integrate(invasion_preset(p, lambda), p, IntegratorConfig::defaults(p));
      CHECK(t.terminal.label == ref.terminal.label);
    }
    IntegratorConfig half = IntegratorConfig::defaults(base);
    half.step *= 0.5;
    CHECK(integrate(invasion_preset(base, lambda), base, half).terminal.label ==
          ref.terminal.label);
  }
}

TEST_CASE("crossing s_u on the insider side implies convergence to s_b") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> theta(1.1, 4.0), frac(0.05, 0.95), u(0.0, 0.5);
  for (int i = 0; i < 40; ++i) {
    const double th = theta(rng);
    const ModelParams p(th, q_hat(th) * frac(rng));
    IntegratorConfig c = IntegratorConfig::defaults(p);
    c.stride = 1;
    const Trajectory t = integrate(invasion_preset(p, u(rng)), p, c);
    const double s_u = *equilibrium_set(p).s_u;
    bool crossed = false;
    for (const auto& x : t.samples) crossed = crossed || x.s1 >= s_u;
    if (crossed) CHECK(t.terminal.label == LimitLabel::Bad);
  }
}

TEST_CASE("every trajectory from a random grid converges") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0), theta(1.05, 4.0), frac(0.05, 0.95);
  for (int i = 0; i < 100; ++i) {
    const double th = theta(rng);
    const ModelParams p(th, q_hat(th) * frac(rng));
    IntegratorConfig c = IntegratorConfig::defaults(p);
    c.stride = 1000;
    const Trajectory t = integrate({0.0, u(rng), u(rng), u(rng)}, p, c);
    CHECK(t.terminal.label != LimitLabel::MaxTimeExceeded);
  }
}

TEST_CASE("max time exceeded is reported") {
  const ModelParams p(2.0, 0.05);
  IntegratorConfig c = IntegratorConfig::defaults(p);
  c.t_max = 1.0;
  const Trajectory t = integrate(invasion_preset(p, 0.3), p, c);
  CHECK(t.terminal.label == LimitLabel::MaxTimeExceeded);
  CHECK(t.samples.back().t == doctest::Approx(1.0));
}

TEST_CASE("trajectory CSV") {
  const ModelParams p(2.0, 0.05);
  IntegratorConfig c = IntegratorConfig::defaults(p);
  c.t_max = 0.05;
  c.stride = 1;
  const Trajectory t = integrate(invasion_preset(p, 0.118), p, c);
  std::ostringstream os;
  write_trajectory_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,s1,s0,s");
  std::getline(is, line);
  CHECK(line == "0,0,0.37769341987788979,0.10933500317837974");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 5);
}
