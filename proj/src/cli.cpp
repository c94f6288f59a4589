#include "trustdyn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trustdyn/dynamics.hpp"
#include "trustdyn/equilibria.hpp"
#include "trustdyn/format.hpp"
#include "trustdyn/kernels.hpp"
#include "trustdyn/model.hpp"

namespace trustdyn::cli {

namespace {

using nlohmann::ordered_json;

/// Runtime failure after validation; exit status 3.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string human(double v) { return format_number(v, 6); }

std::string human(const std::optional<double>& v) {
  return v ? human(*v) : std::string("-");
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid " + std::string(what) + ": '" +
                      std::string(text) + "' is not a number");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Config file

const std::map<std::string, std::string, std::less<>>& known_keys() {
  static const std::map<std::string, std::string, std::less<>> keys = {
      {"theta", "number"},     {"q", "number"},       {"delta", "number"},
      {"lambda", "number"},    {"s1_0", "number"},    {"s0_0", "number"},
      {"preset", "string"},    {"step", "number"},    {"t_max", "number"},
      {"tol", "number"},       {"lambda_tol", "number"},
      {"theta_grid", "grid"},  {"q_grid", "grid"},    {"q_mode", "string"},
      {"out", "string"},       {"format", "string"},  {"stride", "integer"},
      {"points", "integer"},   {"jobs", "integer"},
  };
  return keys;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text,
                                                    std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double json_number(const ordered_json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::string json_string(const ordered_json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t json_count(const ordered_json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config key '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

Grid json_grid(const ordered_json& v, const std::string& key) {
  if (v.is_string()) return Grid::parse(v.get<std::string>());
  if (v.is_array() && v.size() == 3 && v[0].is_number() && v[1].is_number() &&
      v[2].is_number_integer()) {
    Grid g{v[0].get<double>(), v[1].get<double>(), v[2].get<std::size_t>()};
    return Grid::parse(format_number(g.lo) + ":" + format_number(g.hi) + ":" +
                       std::to_string(g.n));
  }
  throw ConfigError("config key '" + key +
                    "' must be \"lo:hi:n\" or [lo, hi, n]");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("invalid format: '" + std::string(s) + "' (csv|json)");
}

QMode parse_q_mode(std::string_view s) {
  if (s == "fixed") return QMode::Fixed;
  if (s == "halfway") return QMode::Halfway;
  throw ConfigError("invalid q-mode: '" + std::string(s) + "' (fixed|halfway)");
}

// ---------------------------------------------------------------------------
// Validation

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
  if (c.theta) check(*c.theta > 0.0, "invalid --theta: must be positive");
  if (c.q) check(*c.q > 0.0 && *c.q < 1.0, "invalid --q: must lie in (0, 1)");
  check(c.delta > 0.0, "invalid --delta: must be positive");
  if (c.lambda) {
    check(*c.lambda >= 0.0 && *c.lambda <= 1.0,
          "invalid --lambda: must lie in [0, 1]");
  }
  if (c.s1_0) check(*c.s1_0 >= 0.0 && *c.s1_0 <= 1.0, "invalid --s1-0: must lie in [0, 1]");
  if (c.s0_0) check(*c.s0_0 >= 0.0 && *c.s0_0 <= 1.0, "invalid --s0-0: must lie in [0, 1]");
  check(c.preset.empty() || c.preset == "invasion" ||
            c.preset == "counter-invasion",
        "invalid --preset: '" + c.preset + "' (invasion|counter-invasion)");
  check(c.step > 0.0, "invalid --step: must be positive");
  if (c.t_max) check(*c.t_max > 0.0, "invalid --t-max: must be positive");
  check(c.tol > 0.0, "invalid --tol: must be positive");
  check(c.lambda_tol >= 1e-12, "invalid --lambda-tol: must be at least 1e-12");
  check(c.stride >= 1, "invalid --stride: must be at least 1");
  check(c.points >= 2, "invalid --points: must be at least 2");
  check(c.jobs >= 1, "invalid --jobs: must be at least 1");
}

const double& require(const std::optional<double>& v, const char* flag) {
  if (!v) throw ConfigError(std::string("missing required ") + flag);
  return *v;
}

ModelParams model_params(const RunConfig& c) {
  return ModelParams(require(c.theta, "--theta"), require(c.q, "--q"), c.delta);
}

IntegratorConfig integrator_config(const RunConfig& c) {
  IntegratorConfig ic;
  ic.step = c.effective_step();
  ic.t_max = c.effective_t_max();
  ic.tol = c.tol;
  ic.stride = c.stride;
  return ic;
}

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string machine;  // CSV or JSON document
  std::string summary;  // human-readable lines
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw RunFailure("cannot open output file '" + path + "'");
  file << content;
  if (!file) throw RunFailure("failed writing output file '" + path + "'");
}

// Summary first on stdout; machine output only with --out.
void emit_summary_first(const RunConfig& c, const Output& o, std::ostream& out) {
  out << o.summary;
  if (!c.out.empty()) write_file(c.out, o.machine);
}

// Machine output on stdout unless --out; the summary then moves to stderr.
void emit_data_first(const RunConfig& c, const Output& o, std::ostream& out,
                     std::ostream& err) {
  if (c.out.empty()) {
    out << o.machine;
    err << o.summary;
  } else {
    write_file(c.out, o.machine);
    out << o.summary;
  }
}

std::string render(const RunConfig& c, const std::vector<std::string>& header,
                   const std::vector<std::vector<ordered_json>>& rows) {
  std::ostringstream os;
  if (c.format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json rec;
      for (std::size_t i = 0; i < header.size(); ++i) rec[header[i]] = row[i];
      arr.push_back(std::move(rec));
    }
    os << arr.dump(2) << '\n';
    return os.str();
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << (i ? "," : "") << header[i];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      const ordered_json& v = row[i];
      if (v.is_number()) {
        os << format_number(v.get<double>());
      } else if (v.is_string()) {
        os << v.get<std::string>();
      }
    }
    os << '\n';
  }
  return os.str();
}

ordered_json opt_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

// ---------------------------------------------------------------------------
// Commands

int cmd_equilibria(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ModelParams params = model_params(c);
  const EquilibriumSet eq = equilibrium_set(params);
  if (eq.theta_at_one) {
    err << "warning: theta = 1 lies on the boundary between the unique and "
           "multiple equilibrium cases\n";
  }
  std::ostringstream s;
  s << "regime: " << to_string(eq.regime) << '\n';
  s << "s_star: " << human(eq.s_star) << '\n';
  s << "q_hat: " << human(eq.q_hat) << '\n';
  auto line = [&](const char* name, const std::optional<double>& v) {
    if (!v) return;
    s << name << ": " << human(*v) << "  offer " << human(optimal_offer(*v, params))
      << "  total_cheating " << human(total_cheating(params, *v)) << '\n';
  };
  line("s_g", eq.s_g);
  line("s_u", eq.s_u);
  line("s_b", eq.s_b);
  line("s_interior", eq.s_interior);
  if (eq.regime == Regime::Tripartite || eq.regime == Regime::Boundary) {
    s << "roots: (" << human(eq.s_g) << ", " << human(eq.s_u) << ", "
      << human(eq.s_b) << ")\n";
  }

  const std::vector<std::string> header = {"theta", "q", "regime", "s_star",
                                           "q_hat", "s_g", "s_u", "s_b",
                                           "s_interior"};
  const std::vector<std::vector<ordered_json>> rows = {
      {params.theta(), params.q(), std::string(to_string(eq.regime)),
       eq.s_star, opt_json(eq.q_hat), opt_json(eq.s_g), opt_json(eq.s_u),
       opt_json(eq.s_b), opt_json(eq.s_interior)}};
  emit_summary_first(c, {render(c, header, rows), s.str()}, out);
  return 0;
}

int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ModelParams params = model_params(c);
  const EquilibriumSet eq = equilibrium_set(params);
  const std::vector<double> grid = kernels::linspace(0.0, 1.0, c.points);
  std::vector<double> residual(grid.size());
  kernels::fixed_point_residual(grid, params, residual);

  std::vector<std::vector<ordered_json>> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int sign = (residual[i] > 0.0) - (residual[i] < 0.0);
    rows.push_back({grid[i], residual[i] + grid[i], residual[i], sign});
  }
  std::ostringstream s;
  s << "regime: " << to_string(eq.regime) << '\n';
  if (auto boundary = basin_boundary(params)) {
    s << "good basin: [0, " << human(*boundary) << ")  bad basin: ("
      << human(*boundary) << ", 1]\n";
  }
  Output o{render(c, {"s", "realized", "flow", "direction"}, rows), s.str()};
  emit_data_first(c, o, out, err);
  return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ModelParams params = model_params(c);
  const double lambda = require(c.lambda, "--lambda");
  PopulationState start{0.0, 0.0, 0.0, lambda};
  if (c.preset == "invasion") {
    start = invasion_preset(params, lambda);
  } else if (c.preset == "counter-invasion") {
    start = counter_invasion_preset(params, lambda);
  }
  if (c.s1_0) start.s1 = *c.s1_0;
  if (c.s0_0) start.s0 = *c.s0_0;
  if (c.preset.empty() && !(c.s1_0 && c.s0_0)) {
    throw ConfigError("simulate needs --preset or both --s1-0 and --s0-0");
  }

  const Trajectory traj = integrate(start, params, integrator_config(c));
  std::vector<std::vector<ordered_json>> rows;
  rows.reserve(traj.samples.size());
  for (const TrajectorySample& x : traj.samples) rows.push_back({x.t, x.s1, x.s0, x.s});

  std::ostringstream s;
  s << "initial: s1=" << human(start.s1) << " s0=" << human(start.s0)
    << " lambda=" << human(lambda) << '\n';
  s << "terminal: " << to_string(traj.terminal.label) << " at s="
    << human(traj.terminal.value) << " t=" << human(traj.samples.back().t)
    << " residual=" << human(traj.terminal.residual) << '\n';
  emit_data_first(c, {render(c, {"t", "s1", "s0", "s"}, rows), s.str()}, out, err);
  if (traj.terminal.label == LimitLabel::MaxTimeExceeded) {
    err << "error: trajectory did not converge before t_max\n";
    return 3;
  }
  return 0;
}

int cmd_lambda_star(const RunConfig& c, std::ostream& out, std::ostream&) {
  const ModelParams params = model_params(c);
  if (equilibrium_set(params).regime != Regime::Tripartite) {
    throw ConfigError("invalid --q: lambda-star needs q < q_hat(theta) = " +
                      human(params.theta() >= 1.0 ? q_hat(params.theta()) : 0.0) +
                      " and theta > 1");
  }
  IntegratorConfig ic = integrator_config(c);
  ic.stride = std::numeric_limits<std::size_t>::max();
  const LambdaStarResult r = lambda_star(params, c.lambda_tol, ic);

  std::ostringstream s;
  s << "lambda_star: " << human(r.lambda_star) << '\n';
  s << "bracket: [" << format_number(r.lo) << ", " << format_number(r.hi) << "]\n";
  s << "probes: " << r.verdicts.size()
    << (r.verdicts_monotone() ? "" : "  (non-monotone verdicts)") << '\n';
  if (!r.lambda_star) s << "no invasion of size <= 1/2 disrupts the good equilibrium\n";
  const std::vector<std::vector<ordered_json>> rows = {
      {params.theta(), params.q(), opt_json(r.lambda_star),
       static_cast<double>(r.verdicts.size())}};
  emit_summary_first(
      c, {render(c, {"theta", "q", "lambda_star", "verdict_count"}, rows), s.str()},
      out);
  return 0;
}

int cmd_halfway_q(const RunConfig& c, std::ostream& out, std::ostream&) {
  const double theta = require(c.theta, "--theta");
  if (!(theta > 1.0)) throw ConfigError("invalid --theta: halfway-q needs theta > 1");
  const double q = halfway_q(theta);
  const auto roots = interior_roots(ModelParams(theta, q));
  std::ostringstream s;
  s << "q: " << human(q) << '\n'
    << "s_u: " << human(roots->unstable) << "  s_b: " << human(roots->bad) << '\n';
  const std::vector<std::vector<ordered_json>> rows = {
      {theta, q, roots->unstable, roots->bad}};
  emit_summary_first(c, {render(c, {"theta", "q", "s_u", "s_b"}, rows), s.str()}, out);
  return 0;
}

int cmd_sweep_cheating(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const double theta = require(c.theta, "--theta");
  if (!(theta > 1.0)) throw ConfigError("invalid --theta: sweep-cheating needs theta > 1");
  if (!c.q_grid) throw ConfigError("missing required --q-grid");
  const std::vector<double> qs = c.q_grid->values();
  for (double q : qs) {
    check(q > 0.0 && q < 1.0, "invalid --q-grid: every q must lie in (0, 1)");
  }
  const auto records = sweep_total_cheating(theta, qs);
  std::ostringstream machine;
  if (c.format == OutputFormat::Json) {
    machine << sweep_to_json(SweepKind::TotalCheating, records).dump(2) << '\n';
  } else {
    write_sweep_csv(machine, SweepKind::TotalCheating, records);
  }
  std::ostringstream s;
  s << "theta " << human(theta) << ": " << records.size() << " records, q_hat "
    << human(q_hat(theta)) << '\n';
  emit_data_first(c, {machine.str(), s.str()}, out, err);
  return 0;
}

int cmd_sweep_lambda_star(const RunConfig& c, std::ostream& out,
                          std::ostream& err) {
  if (!c.theta_grid) throw ConfigError("missing required --theta-grid");
  LambdaSweepOptions opts;
  opts.mode = c.q_mode;
  if (opts.mode == QMode::Fixed) opts.q = require(c.q, "--q");
  opts.tol = c.lambda_tol;
  opts.delta = c.delta;
  if (c.step_explicit) opts.step = c.step;
  opts.t_max = c.t_max;
  opts.jobs = c.jobs;
  const auto records = sweep_lambda_star(c.theta_grid->values(), opts);

  std::ostringstream machine;
  if (c.format == OutputFormat::Json) {
    machine << sweep_to_json(SweepKind::LambdaStar, records).dump(2) << '\n';
  } else {
    write_sweep_csv(machine, SweepKind::LambdaStar, records);
  }
  std::ostringstream s;
  std::size_t flagged = 0;
  for (const SweepRecord& r : records) {
    if (r.flag.empty()) continue;
    ++flagged;
    err << "warning: theta=" << human(r.theta) << " q=" << human(r.q) << ": "
        << r.flag << '\n';
  }
  s << records.size() << " records, " << flagged << " flagged\n";
  emit_data_first(c, {machine.str(), s.str()}, out, err);
  return 0;
}

unsigned jobs_from_env() {
  if (const char* env = std::getenv("TRUSTDYN_JOBS")) {
    const double v = parse_double(env, "TRUSTDYN_JOBS");
    if (!(v >= 1.0) || v != static_cast<unsigned>(v)) {
      throw ConfigError("invalid TRUSTDYN_JOBS: must be a positive integer");
    }
    return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace

// ---------------------------------------------------------------------------

Grid Grid::parse(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) {
    throw ConfigError("invalid grid '" + std::string(text) + "': expected lo:hi:n");
  }
  Grid g;
  g.lo = parse_double(text.substr(0, a), "grid lower bound");
  g.hi = parse_double(text.substr(a + 1, b - a - 1), "grid upper bound");
  const double n = parse_double(text.substr(b + 1), "grid point count");
  if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n))) {
    throw ConfigError("invalid grid '" + std::string(text) +
                      "': n must be a positive integer");
  }
  g.n = static_cast<std::size_t>(n);
  if (!(g.lo <= g.hi)) {
    throw ConfigError("invalid grid '" + std::string(text) + "': lo > hi");
  }
  if (g.n == 1 && g.lo != g.hi) {
    throw ConfigError("invalid grid '" + std::string(text) +
                      "': a single point needs lo == hi");
  }
  return g;
}

std::vector<double> Grid::values() const { return kernels::linspace(lo, hi, n); }

double RunConfig::effective_step() const {
  return step_explicit ? step : std::min(1e-2, 1e-1 / delta);
}

double RunConfig::effective_t_max() const {
  return t_max ? *t_max : 1e3 / delta;
}

RunConfig parse_config_text(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (known_keys().find(key) == known_keys().end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    if (key == "theta") c.theta = json_number(value, key);
    else if (key == "q") c.q = json_number(value, key);
    else if (key == "delta") c.delta = json_number(value, key);
    else if (key == "lambda") c.lambda = json_number(value, key);
    else if (key == "s1_0") c.s1_0 = json_number(value, key);
    else if (key == "s0_0") c.s0_0 = json_number(value, key);
    else if (key == "preset") c.preset = json_string(value, key);
    else if (key == "step") { c.step = json_number(value, key); c.step_explicit = true; }
    else if (key == "t_max") c.t_max = json_number(value, key);
    else if (key == "tol") c.tol = json_number(value, key);
    else if (key == "lambda_tol") c.lambda_tol = json_number(value, key);
    else if (key == "theta_grid") c.theta_grid = json_grid(value, key);
    else if (key == "q_grid") c.q_grid = json_grid(value, key);
    else if (key == "q_mode") c.q_mode = parse_q_mode(json_string(value, key));
    else if (key == "out") c.out = json_string(value, key);
    else if (key == "format") c.format = parse_format(json_string(value, key));
    else if (key == "stride") c.stride = json_count(value, key);
    else if (key == "points") c.points = json_count(value, key);
    else if (key == "jobs") c.jobs = static_cast<unsigned>(json_count(value, key));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_config_text(buf.str());
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trust-game equilibria, perception dynamics and invasion experiments",
               "trustdyn"};
  app.require_subcommand(1);

  // Raw flag values; only options actually given override the config file.
  struct Raw {
    double theta = 0, q = 0, delta = 1, lambda = 0, s1_0 = 0, s0_0 = 0;
    double step = 0, t_max = 0, tol = 0, lambda_tol = 0;
    std::string preset, theta_grid, q_grid, q_mode, out, format, config;
    std::size_t stride = 0, points = 0;
    unsigned jobs = 0;
  } raw;
  std::map<std::string, CLI::Option*> given;

  auto add = [&](CLI::App* sub, const std::string& name, auto& target,
                 const std::string& help) {
    given[sub->get_name() + name] = sub->add_option(name, target, help);
  };
  auto model_flags = [&](CLI::App* sub) {
    add(sub, "--theta", raw.theta, "social-cost weight theta > 0");
    add(sub, "--q", raw.q, "fraction of scoundrels in (0, 1)");
    add(sub, "--delta", raw.delta, "perception adjustment speed (default 1)");
  };
  auto dynamics_flags = [&](CLI::App* sub) {
    add(sub, "--step", raw.step, "RK4 step (default min(1e-2, 1e-1/delta))");
    add(sub, "--t-max", raw.t_max, "integration horizon (default 1e3/delta)");
    add(sub, "--tol", raw.tol, "convergence tolerance (default 1e-10)");
  };
  auto output_flags = [&](CLI::App* sub) {
    add(sub, "--out", raw.out, "write machine-readable output to PATH");
    add(sub, "--format", raw.format, "csv|json (default csv)");
    add(sub, "--config", raw.config, "JSON run configuration; flags override it");
  };

  struct Sub {
    Command command;
    CLI::App* app;
  };
  std::vector<Sub> subs;

  auto* eq = app.add_subcommand("equilibria", "closed-form equilibria and threshold");
  model_flags(eq);
  output_flags(eq);
  subs.push_back({Command::Equilibria, eq});

  auto* flow = app.add_subcommand("flow", "common-perception flow on a grid of s");
  model_flags(flow);
  add(flow, "--points", raw.points, "grid points on [0, 1] (default 101)");
  output_flags(flow);
  subs.push_back({Command::Flow, flow});

  auto* sim = app.add_subcommand("simulate", "integrate the insider/outsider system");
  model_flags(sim);
  add(sim, "--lambda", raw.lambda, "outsider share in [0, 1]");
  add(sim, "--s1-0", raw.s1_0, "initial insider perception");
  add(sim, "--s0-0", raw.s0_0, "initial outsider perception");
  add(sim, "--preset", raw.preset, "invasion|counter-invasion");
  dynamics_flags(sim);
  add(sim, "--stride", raw.stride, "record every N-th step (default 10)");
  output_flags(sim);
  subs.push_back({Command::Simulate, sim});

  auto* ls = app.add_subcommand("lambda-star", "minimum disrupting invasion share");
  model_flags(ls);
  dynamics_flags(ls);
  add(ls, "--lambda-tol", raw.lambda_tol, "bisection tolerance (default 1e-12)");
  output_flags(ls);
  subs.push_back({Command::LambdaStar, ls});

  auto* hq = app.add_subcommand("halfway-q", "q putting s_u halfway between s_g and s_b");
  add(hq, "--theta", raw.theta, "social-cost weight theta > 1");
  output_flags(hq);
  subs.push_back({Command::HalfwayQ, hq});

  auto* sc = app.add_subcommand("sweep-cheating", "total cheating across a q grid");
  add(sc, "--theta", raw.theta, "social-cost weight theta > 1");
  add(sc, "--q-grid", raw.q_grid, "lo:hi:n");
  output_flags(sc);
  subs.push_back({Command::SweepCheating, sc});

  auto* sl = app.add_subcommand("sweep-lambda-star", "lambda_star across a theta grid");
  add(sl, "--theta-grid", raw.theta_grid, "lo:hi:n");
  add(sl, "--q", raw.q, "fixed scoundrel fraction (fixed mode)");
  add(sl, "--q-mode", raw.q_mode, "fixed|halfway (default fixed)");
  add(sl, "--delta", raw.delta, "perception adjustment speed (default 1)");
  dynamics_flags(sl);
  add(sl, "--lambda-tol", raw.lambda_tol, "bisection tolerance (default 1e-12)");
  add(sl, "--jobs", raw.jobs, "worker threads (fallback: TRUSTDYN_JOBS)");
  output_flags(sl);
  subs.push_back({Command::SweepLambdaStar, sl});

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    // help() delegates to the subcommand being parsed, if any.
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const Sub* chosen = nullptr;
  for (const Sub& s : subs) {
    if (s.app->parsed()) chosen = &s;
  }
  if (chosen == nullptr) {
    err << "error: no subcommand given\n";
    return 2;
  }
  const std::string prefix = chosen->app->get_name();
  auto has = [&](const std::string& flag) {
    auto it = given.find(prefix + flag);
    return it != given.end() && it->second->count() > 0;
  };

  try {
    RunConfig c = has("--config") ? load_config(raw.config) : RunConfig{};
    c.command = chosen->command;
    if (has("--theta")) c.theta = raw.theta;
    if (has("--q")) c.q = raw.q;
    if (has("--delta")) c.delta = raw.delta;
    if (has("--lambda")) c.lambda = raw.lambda;
    if (has("--s1-0")) c.s1_0 = raw.s1_0;
    if (has("--s0-0")) c.s0_0 = raw.s0_0;
    if (has("--preset")) c.preset = raw.preset;
    if (has("--step")) {
      c.step = raw.step;
      c.step_explicit = true;
    }
    if (has("--t-max")) c.t_max = raw.t_max;
    if (has("--tol")) c.tol = raw.tol;
    if (has("--lambda-tol")) c.lambda_tol = raw.lambda_tol;
    if (has("--theta-grid")) c.theta_grid = Grid::parse(raw.theta_grid);
    if (has("--q-grid")) c.q_grid = Grid::parse(raw.q_grid);
    if (has("--q-mode")) c.q_mode = parse_q_mode(raw.q_mode);
    if (has("--out")) c.out = raw.out;
    if (has("--format")) c.format = parse_format(raw.format);
    if (has("--stride")) c.stride = raw.stride;
    if (has("--points")) c.points = raw.points;
    if (has("--jobs")) {
      c.jobs = raw.jobs;
    } else if (std::getenv("TRUSTDYN_JOBS") != nullptr) {
      c.jobs = jobs_from_env();
    }
    validate(c);

    switch (c.command) {
      case Command::Equilibria: return cmd_equilibria(c, out, err);
      case Command::Flow: return cmd_flow(c, out, err);
      case Command::Simulate: return cmd_simulate(c, out, err);
      case Command::LambdaStar: return cmd_lambda_star(c, out, err);
      case Command::HalfwayQ: return cmd_halfway_q(c, out, err);
      case Command::SweepCheating: return cmd_sweep_cheating(c, out, err);
      case Command::SweepLambdaStar: return cmd_sweep_lambda_star(c, out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const RegimeError& e) {
    err << "error: " << e.what() << " (check --theta and --q)\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 3;
}

}  // namespace trustdyn::cli
