#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "runner.hpp"

namespace fs = std::filesystem;
using diffspace::cli::RunOptions;
using diffspace::cli::run_command;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("diffspace_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

Run run(const std::string& cmd, RunOptions o) {
  std::ostringstream out, err;
  const int code = run_command(cmd, o, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSmallVerify = R"({"verify": {"suites": ["boundary-squared", "chain-rule", "d-squared"],
  "counts": {"d_squared_forms": 3, "chain_rule_draws": 5}}})";

}  // namespace

TEST_CASE("cohomology command writes dimension lists") {
  const fs::path dir = scratch("cohomology");
  RunOptions o;
  o.out_dir = (dir / "out").string();
  o.config_path = write_config(dir, R"({"cohomology": {"covers": ["circle-3", "interval-2"], "derham": []}})").string();
  const Run r = run("cohomology", o);
  CHECK(r.code == 0);
  CHECK(r.out.find("circle-3        dims (1,1)") != std::string::npos);
  CHECK(slurp(dir / "out" / "cohomology.csv") ==
        "cover,degree,dim\ncircle-3,0,1\ncircle-3,1,1\ninterval-2,0,1\ninterval-2,1,0\n");
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "cohomology.json"));
  CHECK(j["status"] == "pass");
}

TEST_CASE("verify exit status follows the tolerance") {
  const fs::path dir = scratch("verify");
  RunOptions o;
  o.out_dir = (dir / "out").string();
  o.config_path = write_config(dir, kSmallVerify).string();
  CHECK(run("verify", o).code == 0);
  o.tolerance = 0.0;
  const Run strict = run("verify", o);
  CHECK(strict.code == 1);
  CHECK(strict.out.find("FAIL") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = write_config(dir, kSmallVerify);
  RunOptions a, b;
  a.config_path = b.config_path = cfg.string();
  a.out_dir = (dir / "a").string();
  b.out_dir = (dir / "b").string();
  a.workers = 1;
  b.workers = 3;
  REQUIRE(run("verify", a).code == 0);
  REQUIRE(run("verify", b).code == 0);
  for (const char* f : {"verify.csv", "verify.json", "verify.txt"}) CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  RunOptions c = a;
  c.seed = 99;
  c.out_dir = (dir / "c").string();
  REQUIRE(run("verify", c).code == 0);
  CHECK(slurp(dir / "a" / "verify.csv") != slurp(dir / "c" / "verify.csv"));
}

TEST_CASE("config errors exit with status 2") {
  const fs::path dir = scratch("errors");
  RunOptions o;
  o.out_dir = (dir / "out").string();
  struct Case {
    const char* command;
    const char* config;
    const char* message;
  };
  for (const Case c : {
           Case{"verify",
                R"({"verify": {"suites": ["chain-rule"], "forms": [{"id": "a", "space": "plane", "terms": [{"entries": ["x1 +* x2", "x2"]}]}]}})",
                "line 1, column 5"},
           Case{"flow", "{\"seed\": 1,\n \"flow\": [}", "line 2, column 11"},
           Case{"verify", R"({"verify": {"suites": ["no-such-suite"]}})", "unknown suite 'no-such-suite'"},
           Case{"flow", R"({"flow": {"experiments": ["no-such-flow"], "probes": []}})", "unknown flow fixture"},
           Case{"orbit-demo", R"({"orbit_demo": {"radii": [0, 1, 2]}})", "degenerate cube"},
           Case{"cohomology", R"({"cohomology": {"covers": [{"id": "x", "space": "mars", "regions": []}]}})",
                "unknown space 'mars'"},
       }) {
    CAPTURE(c.config);
    o.config_path = write_config(dir, c.config).string();
    const Run r = run(c.command, o);
    CHECK(r.code == 2);
    CHECK(r.err.find(c.message) != std::string::npos);
  }
  o.config_path = (dir / "missing.json").string();
  CHECK(run("flow", o).code == 2);
  CHECK(run("bogus", RunOptions{}).code == 2);
}

TEST_CASE("custom spaces and flow experiments") {
  const fs::path dir = scratch("custom");
  RunOptions o;
  o.out_dir = (dir / "out").string();
  o.config_path = write_config(dir, R"({
    "spaces": {"ray": {"dim": 1, "clauses": [[{"kind": "ge", "expr": "x1"}]],
                       "sampler": {"parametrizations": [{"map": ["x1"], "range": [[0, 3]]}], "fixed_points": [[0]]}}},
    "flow": {"experiments": [{"id": "drift", "space": "ray", "field": ["-1"], "start": [1], "span": [-1, 2],
                              "closed_form": ["1 - t"], "expect": "left-space"}],
             "probes": []}})")
                      .string();
  const Run r = run("flow", o);
  CHECK(r.code == 0);
  const std::string summary = slurp(dir / "out" / "flow.csv");
  CHECK(summary.find("drift,\"(1)\",-1,1.00000001") != std::string::npos);
  CHECK(summary.find("left-space") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "flow_drift.csv"));
}

TEST_CASE("orbit demo with a single radius skips the fit") {
  const fs::path dir = scratch("orbit");
  RunOptions o;
  o.out_dir = (dir / "out").string();
  o.config_path = write_config(dir, R"({"orbit_demo": {"radii": [1], "samples": 50}})").string();
  const Run r = run("orbit-demo", o);
  CHECK(r.code == 0);
  CHECK(r.out.find("slope fit skipped") != std::string::npos);
  CHECK(r.out.find("omega     1       6.28318530717958") != std::string::npos);
}
