// Integration tests that drive the built CLI binary end to end: dispatch,
// report schemas, determinism and exit codes.

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const fs::path kWorkDir = fs::temp_directory_path() / "berk_cli_tests";

struct RunResult {
  int exit_code;
  Json report;
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RunResult run_cli(const Json& config, const std::string& extra_flags = "") {
  fs::create_directories(kWorkDir);
  const fs::path cfg = kWorkDir / "config.json";
  const fs::path out = kWorkDir / "report.json";
  std::error_code ec;
  fs::remove(out, ec);
  write_file(cfg, config.dump(2));
  const std::string cmd = std::string(BERK_CLI_PATH) + " --config " + cfg.string() + " --out " +
                          out.string() + " " + extra_flags + " 2> " +
                          (kWorkDir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WEXITSTATUS(status);
  if (fs::exists(out) && res.exit_code == 0) {
    std::ifstream in(out);
    in >> res.report;
  }
  return res;
}

Json geometric_series(long N = 30) {
  return Json{{"family", "geometric"}, {"params", {{"vlambda", "-1"}}}, {"N", N}};
}

}  // namespace

TEST_CASE("phi command emits the polygon with its slopes") {
  Json config{{"command", "phi"},
              {"params", {{"series", geometric_series()}, {"window", {"0", "10"}}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["schema_version"] == "1");
  CHECK(res.report["command"] == "phi");
  const auto& r = res.report["result"];
  CHECK(r["convex"] == true);
  REQUIRE(r["slopes"].size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(r["slopes"][i] == std::to_string(i + 1));
}

TEST_CASE("identical config and seed give byte-identical reports") {
  Json config{{"command", "degree-check"},
              {"field", {{"kind", "p-adic"}, {"p", 2}}},
              {"params",
               {{"mode", "bound"},
                {"map", {{"coeffs", {"-1/4", "0", "1"}}}},
                {"affinoid", {{"boundary", {{{"center", "0"}, {"tau", "2"}}}}}},
                {"sample_count", 8}}}};
  auto first = run_cli(config, "--seed 42");
  REQUIRE(first.exit_code == 0);
  const std::string bytes1 = read_file(kWorkDir / "report.json");
  auto second = run_cli(config, "--seed 42");
  REQUIRE(second.exit_code == 0);
  CHECK(bytes1 == read_file(kWorkDir / "report.json"));
  CHECK(first.report["result"]["all_bounded"] == true);

  // sharded execution assembles the same report
  auto sharded = run_cli(config, "--seed 42 --parallel 4");
  REQUIRE(sharded.exit_code == 0);
  CHECK(bytes1 == read_file(kWorkDir / "report.json"));
}

TEST_CASE("enumerate command reports the degree bound") {
  Json config{{"command", "enumerate"},
              {"params", {{"q", 2}, {"S", {"0", "1", "inf"}}, {"d_max", 3}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"]["count"] == 6);
  CHECK(res.report["result"]["max_degree"] == 1);
  CHECK(res.report["result"]["bound_satisfied"] == true);
}

TEST_CASE("probe command runs the pointwise limit experiment") {
  Json config{{"command", "probe"},
              {"field", {{"kind", "laurent-q"}}},
              {"params",
               {{"probe", "pointwise"},
                {"family", {{"kind", "shifted-monomial"}, {"r", 1}, {"s", 2}, {"a", {{1, "1"}}}}},
                {"point", {{"center", "1"}, {"tau", "-inf"}}},
                {"witnesses", {"0", "1"}},
                {"n_max", 15}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"].contains("inferred_ball"));
  CHECK(res.report["result"]["inferred_ball"]["tau"] == "-1");
}

TEST_CASE("fast-arc command") {
  Json config{{"command", "fast-arc"},
              {"field", {{"kind", "p-adic"}, {"p", 3}}},
              {"params",
               {{"map", {{"coeffs", {"0", "0", "1"}}}},
                {"affinoid",
                 {{"boundary",
                   {{{"center", "0"}, {"tau", "5"}}, {{"center", "1"}, {"tau", "-1"}}}}}},
                {"start", {{"center", "0"}, {"tau", "-3"}}}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"]["C"] == "1/2");
  CHECK(res.report["result"]["boundary_degree"] == 2);
  CHECK(res.report["result"]["vertices"].size() == 3);
}

TEST_CASE("good-reduction probe command") {
  Json config{{"command", "probe"},
              {"field", {{"kind", "p-adic"}, {"p", 3}}},
              {"params",
               {{"probe", "good-reduction"},
                {"map", {{"coeffs", {"0", "0", "1"}}}},
                {"zeta", "2"},
                {"n_max", 4},
                {"samples", {"2", "5"}}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"]["case"] == "periodic-ball");
  CHECK(res.report["result"]["preperiod"] == 1);
  CHECK(res.report["result"]["period"] == 1);
  for (const auto& row : res.report["result"]["samples"]) CHECK(row["ok"] == true);
}

TEST_CASE("probe rows export as csv") {
  Json config{{"command", "probe"},
              {"field", {{"kind", "laurent-fp"}, {"p", 2}}},
              {"params",
               {{"probe", "degree-explosion"},
                {"family", {{"kind", "scaled-power"}, {"u", {{1, "1"}}}}},
                {"point", {{"center", "0"}, {"tau", "0"}}},
                {"n_max", 5}}}};
  fs::create_directories(kWorkDir);
  const fs::path cfg = kWorkDir / "config.json";
  const fs::path out = kWorkDir / "probe.csv";
  write_file(cfg, config.dump(2));
  const std::string cmd = std::string(BERK_CLI_PATH) + " --config " + cfg.string() + " --out " +
                          out.string() + " --format csv 2> /dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string csv = read_file(out);
  CHECK(csv.rfind("n,degree,log_diam\n", 0) == 0);
  CHECK(csv.find("\n5,32,-32\n") != std::string::npos);  // 2^5 (0 - 1)
}

TEST_CASE("classify command") {
  Json config{{"command", "classify"},
              {"field", {{"kind", "p-adic"}, {"p", 3}}},
              {"params", {{"map", {{"coeffs", {"0", "3", "1"}}}}, {"z0", "0"}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"]["class"] == "attracting");
  CHECK(res.report["result"]["normal"] == true);
}

TEST_CASE("degree-check sum mode") {
  Json config{{"command", "degree-check"},
              {"field", {{"kind", "p-adic"}, {"p", 3}}},
              {"params",
               {{"mode", "sum"},
                {"map", {{"coeffs", {"0", "0", "1"}}}},
                {"target", {{"center", "1"}, {"tau", "-1"}}},
                {"domain", {{"center", "0"}, {"tau", "0"}}}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"]["total"] == 2);
  CHECK(res.report["result"]["expected"] == 2);
  CHECK(res.report["result"]["fibers"].size() == 2);
}

TEST_CASE("cantor command with itinerary samples") {
  Json config{{"command", "cantor"},
              {"field", {{"kind", "p-adic"}, {"p", 2}}},
              {"params", {{"c", "3/16"}, {"depth", 5}, {"samples", {"1/4", "3/4"}}}}};
  auto res = run_cli(config);
  REQUIRE(res.exit_code == 0);
  CHECK(res.report["result"]["separation_level"] == 2);
  CHECK(res.report["result"]["disjoint_ok"] == true);
  CHECK(res.report["result"]["counts_ok"] == true);
  REQUIRE(res.report["result"]["itineraries"].size() == 2);
  for (const auto& row : res.report["result"]["itineraries"]) {
    CHECK(row["shift_ok"] == true);
    CHECK(row["address_ok"] == true);
  }
}

TEST_CASE("validation failures exit with code 1") {
  SECTION("unknown config key") {
    Json config{{"command", "phi"}, {"params", Json::object()}, {"bogus", 1}};
    CHECK(run_cli(config).exit_code == 1);
  }
  SECTION("unknown command") {
    Json config{{"command", "frobnicate"}, {"params", Json::object()}};
    CHECK(run_cli(config).exit_code == 1);
  }
  SECTION("csv is reserved for phi") {
    Json config{{"command", "enumerate"},
                {"params", {{"q", 2}, {"S", {"0", "1", "inf"}}, {"d_max", 1}}}};
    CHECK(run_cli(config, "--format csv").exit_code == 1);
  }
  SECTION("violated precondition in the library") {
    // window not certified by the truncation
    Json config{{"command", "phi"},
                {"params", {{"series", geometric_series(4)}, {"window", {"0", "50"}}}}};
    CHECK(run_cli(config).exit_code == 1);
  }
  SECTION("unknown params key") {
    Json config{{"command", "phi"},
                {"params",
                 {{"series", geometric_series()}, {"window", {"0", "5"}}, {"typo", true}}}};
    CHECK(run_cli(config).exit_code == 1);
  }
}

TEST_CASE("csv output samples breakpoints and midpoints") {
  Json config{{"command", "phi"},
              {"params", {{"series", geometric_series()}, {"window", {"0", "4"}}}}};
  fs::create_directories(kWorkDir);
  const fs::path cfg = kWorkDir / "config.json";
  const fs::path out = kWorkDir / "phi.csv";
  write_file(cfg, config.dump(2));
  const std::string cmd = std::string(BERK_CLI_PATH) + " --config " + cfg.string() + " --out " +
                          out.string() + " --format csv 2> /dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string csv = read_file(out);
  CHECK(csv.rfind("tau,phi\n", 0) == 0);
  CHECK(csv.find("\n1/2,1/2\n") != std::string::npos);  // midpoint of the first piece
  CHECK(csv.find("\n2,3\n") != std::string::npos);      // breakpoint value
}
