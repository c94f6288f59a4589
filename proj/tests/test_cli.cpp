#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "trustdyn/cli.hpp"

using namespace trustdyn;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("trustdyn_test_" + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

TEST_CASE("equilibria subcommand") {
  const Result r = run_cli({"equilibria", "--theta", "1.375", "--q", "0.1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("regime: Tripartite") != std::string::npos);
  CHECK(r.out.find("roots: (0, 0.0641551, 0.324734)") != std::string::npos);

  const Result one = run_cli({"equilibria", "--theta", "1", "--q", "0.5"});
  CHECK(one.code == 0);
  CHECK(one.out.find("regime: GoodOnly") != std::string::npos);
  CHECK(one.err.find("warning: theta = 1") != std::string::npos);
}

TEST_CASE("argument validation exits with status 2") {
  CHECK(run_cli({"equilibria", "--theta", "1.5"}).code == 2);
  const Result bad_q = run_cli({"equilibria", "--theta", "1.5", "--q", "1.5"});
  CHECK(bad_q.code == 2);
  CHECK(bad_q.err.find("--q") != std::string::npos);
  CHECK(run_cli({"equilibria", "--theta", "abc", "--q", "0.1"}).code == 2);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"simulate", "--theta", "2", "--q", "0.05", "--lambda", "0.1",
                 "--preset", "sideways"}).code == 2);
  CHECK(run_cli({"lambda-star", "--theta", "2", "--q", "0.3"}).code == 2);
  CHECK(run_cli({"sweep-cheating", "--theta", "1.5", "--q-grid", "0.1:0.01:3"}).code == 2);
}

TEST_CASE("help for every subcommand") {
  for (const char* sub : {"equilibria", "flow", "simulate", "lambda-star", "halfway-q",
                          "sweep-cheating", "sweep-lambda-star"}) {
    const Result r = run_cli({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find(sub) != std::string::npos);
  }
  const Result top = run_cli({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out.find("sweep-lambda-star") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory and reports the limit") {
  const fs::path out = temp_path("sim.csv");
  const Result r = run_cli({"simulate", "--theta", "2", "--q", "0.05", "--lambda",
                            "0.118", "--preset", "invasion", "--out", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("terminal: Bad") != std::string::npos);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("t,s1,s0,s\n", 0) == 0);
  fs::remove(out);

  const Result stalled = run_cli({"simulate", "--theta", "2", "--q", "0.05", "--lambda",
                                  "0.3", "--preset", "invasion", "--t-max", "1"});
  CHECK(stalled.code == 3);
}

TEST_CASE("csv and json encode the same values") {
  const fs::path csv = temp_path("sweep.csv");
  const fs::path json = temp_path("sweep.json");
  const std::vector<std::string> base = {"sweep-cheating", "--theta", "1.5",
                                         "--q-grid", "0.01:0.2:12"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  REQUIRE(run_cli(with({"--out", csv.string()})).code == 0);
  REQUIRE(run_cli(with({"--out", json.string(), "--format", "json"})).code == 0);

  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "q,s_b,total_cheating,regime");
  const auto doc = nlohmann::json::parse(slurp(json));
  REQUIRE(doc.size() == 12);
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    const auto cells = split_line(line);
    REQUIRE(cells.size() == 4);
    CHECK(std::strtod(cells[0].c_str(), nullptr) == doc[i]["q"].get<double>());
    if (cells[1].empty()) {
      CHECK(doc[i]["s_b"].is_null());
    } else {
      CHECK(std::strtod(cells[1].c_str(), nullptr) == doc[i]["s_b"].get<double>());
    }
    CHECK(std::strtod(cells[2].c_str(), nullptr) == doc[i]["total_cheating"].get<double>());
    CHECK(cells[3] == doc[i]["regime"].get<std::string>());
    ++i;
  }
  CHECK(i == 12);
  fs::remove(csv);
  fs::remove(json);
}

TEST_CASE("repeated runs produce identical files") {
  const fs::path a = temp_path("ls_a.csv");
  const fs::path b = temp_path("ls_b.csv");
  for (const fs::path& p : {a, b}) {
    REQUIRE(run_cli({"sweep-lambda-star", "--theta-grid", "1.5:2.5:3", "--q", "0.04",
                     "--lambda-tol", "1e-8", "--jobs", "2", "--out", p.string()})
                .code == 0);
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("theta,q,lambda_star,verdict_count\n", 0) == 0);
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("other subcommands run") {
  CHECK(run_cli({"flow", "--theta", "1.375", "--q", "0.1", "--points", "11"}).code == 0);
  const Result hq = run_cli({"halfway-q", "--theta", "1.5"});
  CHECK(hq.code == 0);
  CHECK(hq.out.find("q: 0.111111") != std::string::npos);
  const Result ls = run_cli({"lambda-star", "--theta", "2", "--q", "0.05",
                             "--lambda-tol", "1e-6"});
  CHECK(ls.code == 0);
  CHECK(ls.out.find("lambda_star: 0.117") != std::string::npos);
  const Result sweep = run_cli({"sweep-lambda-star", "--theta-grid", "1.5:2:2",
                                "--q-mode", "halfway", "--lambda-tol", "1e-6",
                                "--format", "json"});
  CHECK(sweep.code == 0);
  CHECK(nlohmann::json::parse(sweep.out).size() == 2);
}

TEST_CASE("config files") {
  SUBCASE("empty object gives defaults") {
    const cli::RunConfig c = cli::parse_config_text("{}");
    CHECK(c.delta == 1.0);
    CHECK(c.effective_step() == 0.01);
    CHECK(c.tol == 1e-10);
    CHECK_FALSE(c.theta);
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_WITH_AS(cli::parse_config_text(R"({"thetta": 2})"),
                         doctest::Contains("thetta"), cli::ConfigError);
  }
  SUBCASE("parse error reports line and column") {
    CHECK_THROWS_WITH_AS(cli::parse_config_text("{\n  \"theta\": 2,\n  oops\n}"),
                         doctest::Contains("line 3"), cli::ConfigError);
  }
  SUBCASE("wrong type") {
    CHECK_THROWS_AS(cli::parse_config_text(R"({"theta": "two"})"), cli::ConfigError);
  }
  SUBCASE("flags override the file") {
    const fs::path cfg = temp_path("cfg.json");
    write(cfg, R"({"theta": 2, "q": 0.3})");
    const Result from_file = run_cli({"equilibria", "--config", cfg.string()});
    CHECK(from_file.code == 0);
    CHECK(from_file.out.find("regime: GoodOnly") != std::string::npos);
    const Result overridden =
        run_cli({"equilibria", "--config", cfg.string(), "--theta", "3", "--q", "0.02"});
    CHECK(overridden.out.find("regime: Tripartite") != std::string::npos);
    CHECK(overridden.out.find("q_hat: 0.0480") != std::string::npos);
    fs::remove(cfg);
  }
  SUBCASE("missing file") {
    CHECK(run_cli({"equilibria", "--config", "/nonexistent/x.json"}).code == 2);
  }
}

TEST_CASE("TRUSTDYN_JOBS fallback is validated") {
  setenv("TRUSTDYN_JOBS", "zero", 1);
  CHECK(run_cli({"sweep-lambda-star", "--theta-grid", "2:2:1", "--q", "0.05"}).code == 2);
  setenv("TRUSTDYN_JOBS", "2", 1);
  CHECK(run_cli({"sweep-lambda-star", "--theta-grid", "2:2:1", "--q", "0.05",
                 "--lambda-tol", "1e-6"}).code == 0);
  unsetenv("TRUSTDYN_JOBS");
}
