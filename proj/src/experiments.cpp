#include "trustdyn/experiments.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "trustdyn/equilibria.hpp"
#include "trustdyn/format.hpp"

namespace trustdyn {

namespace {

constexpr double kMinLambdaTol = 1e-12;
constexpr double kFoldInset = 1e-9;
constexpr double kHalfwayLow = 1e-6;

IntegratorConfig probe_config(const ModelParams& params) {
  IntegratorConfig config = IntegratorConfig::defaults(params);
  // Only the terminal state matters for a verdict.
  config.stride = std::numeric_limits<std::size_t>::max();
  return config;
}

double halfway_residual(double theta, double q) {
  const auto roots = interior_roots(ModelParams(theta, q));
  if (!roots) throw std::logic_error("halfway_q bracket left the interior");
  return roots->unstable - 0.5 * roots->bad;
}

std::string cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

nlohmann::ordered_json json_value(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

bool LambdaStarResult::verdicts_monotone() const {
  bool seen_bad = false;
  for (const auto& [lambda, label] : verdicts) {
    if (label == LimitLabel::Bad) seen_bad = true;
    if (label == LimitLabel::Good && seen_bad) return false;
  }
  return true;
}

LimitLabel invasion_verdict(const ModelParams& params, double lambda,
                            const IntegratorConfig& config) {
  const PopulationState start = invasion_preset(params, lambda);
  LimitLabel label = integrate(start, params, config).terminal.label;
  if (label != LimitLabel::MaxTimeExceeded) return label;

  IntegratorConfig retry = config;
  retry.t_max *= 10.0;
  label = integrate(start, params, retry).terminal.label;
  if (label == LimitLabel::MaxTimeExceeded) {
    throw ProbeFailure("invasion probe at lambda=" + format_number(lambda) +
                       " did not settle within t_max=" +
                       format_number(retry.t_max));
  }
  return label;
}

LambdaStarResult lambda_star(const ModelParams& params, double tol) {
  return lambda_star(params, tol, probe_config(params));
}

LambdaStarResult lambda_star(const ModelParams& params, double tol,
                             const IntegratorConfig& config) {
  if (!(tol >= kMinLambdaTol)) {
    throw std::domain_error("lambda_star tolerance must be at least 1e-12");
  }
  if (equilibrium_set(params).regime != Regime::Tripartite) {
    throw RegimeError("lambda_star requires the Tripartite regime");
  }

  LambdaStarResult result{params, std::nullopt, 0.0, 0.5, {}};
  auto probe = [&](double lambda) {
    const LimitLabel label = invasion_verdict(params, lambda, config);
    result.verdicts[lambda] = label;
    return label;
  };

  const LimitLabel top = probe(0.5);
  if (top == LimitLabel::Good) {
    result.lo = result.hi = 0.5;
    return result;
  }
  if (top == LimitLabel::Unstable) {
    result.lo = result.hi = 0.5;
    result.lambda_star = 0.5;
    return result;
  }
  probe(0.0);

  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const LimitLabel label = probe(mid);
    if (label == LimitLabel::Good) {
      lo = mid;
    } else if (label == LimitLabel::Bad) {
      hi = mid;
    } else {
      // At most one invasion size converges to the unstable point.
      lo = hi = mid;
    }
  }
  result.lo = lo;
  result.hi = hi;
  result.lambda_star = hi;
  return result;
}

double halfway_q(double theta, double tol) {
  if (!(theta > 1.0)) throw std::domain_error("halfway_q requires theta > 1");
  if (!(tol > 0.0)) throw std::domain_error("tol must be positive");
  const double top = q_hat(theta) - kFoldInset;
  double lo = std::min(kHalfwayLow, 0.5 * top);
  double hi = top;
  // s_u - s_b/2 runs from about -1/4 near q = 0 to +s_b/2 at the fold.
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double g = halfway_residual(theta, mid);
    if (std::abs(g) <= tol || mid <= lo || mid >= hi) break;
    (g < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

std::optional<double> SweepRecord::output(std::string_view name) const {
  for (const auto& [key, value] : outputs) {
    if (key == name) return value;
  }
  return std::nullopt;
}

std::vector<SweepRecord> sweep_total_cheating(double theta,
                                              std::span<const double> q_grid) {
  if (!(theta > 1.0)) {
    throw std::domain_error("sweep_total_cheating requires theta > 1");
  }
  std::vector<SweepRecord> records;
  records.reserve(q_grid.size());
  for (const double q : q_grid) {
    SweepRecord rec;
    rec.theta = theta;
    rec.q = q;
    if (!(q > 0.0 && q < 1.0)) {
      rec.flag = "q outside (0, 1)";
      rec.outputs = {{"s_b", std::nullopt}, {"total_cheating", std::nullopt}};
      records.push_back(std::move(rec));
      continue;
    }
    const ModelParams params(theta, q);
    const EquilibriumSet eq = equilibrium_set(params);
    rec.label = std::string(to_string(eq.regime));
    rec.outputs = {{"s_b", eq.s_b},
                   {"total_cheating", total_cheating(params, eq.s_b.value_or(0.0))}};
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SweepRecord> sweep_lambda_star(std::span<const double> theta_grid,
                                           const LambdaSweepOptions& options) {
  std::vector<SweepRecord> records(theta_grid.size());

  auto run_one = [&](std::size_t i) {
    SweepRecord& rec = records[i];
    rec.theta = theta_grid[i];
    rec.q = options.q;
    rec.outputs = {{"lambda_star", std::nullopt}, {"verdict_count", 0.0}};
    try {
      if (!(rec.theta > 1.0)) {
        rec.flag = "theta must exceed 1";
        return;
      }
      if (options.mode == QMode::Halfway) rec.q = halfway_q(rec.theta);
      if (!(rec.q > 0.0 && rec.q < q_hat(rec.theta))) {
        rec.flag = "q not in (0, q_hat(theta)); no interior equilibria";
        return;
      }
      const ModelParams params(rec.theta, rec.q, options.delta);
      IntegratorConfig config = probe_config(params);
      if (options.step) config.step = *options.step;
      if (options.t_max) config.t_max = *options.t_max;
      const LambdaStarResult result = lambda_star(params, options.tol, config);
      rec.outputs = {{"lambda_star", result.lambda_star},
                     {"verdict_count",
                      static_cast<double>(result.verdicts.size())}};
      rec.label = result.lambda_star ? "disrupted" : "survives";
      if (!result.verdicts_monotone()) rec.flag = "non-monotone verdicts";
    } catch (const std::exception& e) {
      rec.flag = e.what();
    }
  };

  const unsigned jobs =
      std::max(1u, std::min<unsigned>(options.jobs,
                                       static_cast<unsigned>(records.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < records.size(); i = next++) run_one(i);
    });
  }
  for (std::thread& t : workers) t.join();
  return records;
}

void write_sweep_csv(std::ostream& os, SweepKind kind,
                     std::span<const SweepRecord> records) {
  if (kind == SweepKind::TotalCheating) {
    os << "q,s_b,total_cheating,regime\n";
    for (const SweepRecord& r : records) {
      os << format_number(r.q) << ',' << cell(r.output("s_b")) << ','
         << cell(r.output("total_cheating")) << ',' << r.label << '\n';
    }
    return;
  }
  os << "theta,q,lambda_star,verdict_count\n";
  for (const SweepRecord& r : records) {
    os << format_number(r.theta) << ',' << format_number(r.q) << ','
       << cell(r.output("lambda_star")) << ','
       << cell(r.output("verdict_count")) << '\n';
  }
}

nlohmann::ordered_json sweep_to_json(SweepKind kind,
                                     std::span<const SweepRecord> records) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const SweepRecord& r : records) {
    nlohmann::ordered_json row;
    if (kind == SweepKind::TotalCheating) {
      row["q"] = r.q;
      row["s_b"] = json_value(r.output("s_b"));
      row["total_cheating"] = json_value(r.output("total_cheating"));
      row["regime"] = r.label;
    } else {
      row["theta"] = r.theta;
      row["q"] = r.q;
      row["lambda_star"] = json_value(r.output("lambda_star"));
      row["verdict_count"] = json_value(r.output("verdict_count"));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace trustdyn
