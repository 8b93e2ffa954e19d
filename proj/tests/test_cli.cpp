#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const char* cli_path() { return std::getenv("GWCP_BIN"); }

struct CliResult {
  int exit_code = -1;
  std::string out;
};

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "gwcp_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  auto out_path = scratch_dir() / ("out_" + std::to_string(counter++) + ".txt");
  std::string cmd = std::string(cli_path()) + " " + args + " > " + out_path.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  res.out = ss.str();
  return res;
}

std::string write_dist(const std::string& name, const std::string& text) {
  auto path = scratch_dir() / name;
  std::ofstream out(path);
  out << text;
  return path.string();
}

// body = everything after the first line (the metadata record)
std::string body_of(const std::string& text) {
  auto pos = text.find('\n');
  return pos == std::string::npos ? std::string() : text.substr(pos + 1);
}

}  // namespace

TEST_CASE("cli usage and exit codes") {
  REQUIRE_MESSAGE(cli_path() != nullptr, "GWCP_BIN must point at the gwcp binary");

  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("bounds").exit_code == 2);  // missing --dist

  auto yaml = run_cli("spectral-radius --hmin 4 --format yaml");
  CHECK(yaml.exit_code == 2);
  CHECK(yaml.out.find("json") != std::string::npos);  // lists the allowed formats

  CHECK(run_cli("bounds --dist /no/such/file.json").exit_code == 3);
}

TEST_CASE("spectral-radius command") {
  auto res = run_cli("spectral-radius --hmin 4");
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j.at("result").at("formula").get<double>() == 0.8);
  CHECK(j.at("meta").at("tool") == "gwcp");

  auto dp = run_cli("spectral-radius --hmin 4 --dp --steps 500");
  REQUIRE(dp.exit_code == 0);
  auto jd = nlohmann::json::parse(dp.out);
  const double est = jd.at("result").at("dp").at("estimate").get<double>();
  CHECK(est > 0.75);
  CHECK(est < 0.8);
}

TEST_CASE("bounds command certifies the degenerate-4 law") {
  auto dist = write_dist("d4.json", R"({"type":"degenerate","d":4})");
  auto res = run_cli("bounds --dist " + dist);
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j.at("result").at("weak_survival") == true);
  CHECK(j.at("result").at("lambda_l_lower").get<double>() >= 1.50);

  // geometric descriptors are reproduction laws, not tree laws
  auto geo = write_dist("geo.json", R"({"type":"geometric","mean":1.5})");
  CHECK(run_cli("bounds --dist " + geo).exit_code == 1);
}

TEST_CASE("certify command") {
  auto res = run_cli("certify --hmin 4 --nu 0.3 --r 0.437 --b 0.256 --full-nv 10000");
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j.at("result").at("feasible") == true);
  CHECK(j.at("result").at("full_check").at("passed") == true);

  auto infeasible = run_cli("certify --hmin 4 --nu 0.35 --r 0.437 --b 0.256");
  CHECK(infeasible.exit_code == 0);  // a clean "infeasible" answer is not a failure
  auto ji = nlohmann::json::parse(infeasible.out);
  CHECK(ji.at("result").at("feasible") == false);

  CHECK(run_cli("certify --hmin 4 --nu 0.3 --r 1.5 --b 0.256").exit_code == 1);
}

TEST_CASE("search-certificate command") {
  auto res = run_cli("search-certificate --hmin 4");
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  CHECK(j.at("result").at("found") == true);
  CHECK(j.at("result").at("certificate").at("lambda").get<double>() >= 1.50);
}

TEST_CASE("paper-table command") {
  auto res = run_cli("paper-table");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("WEAK") != std::string::npos);
  auto js = run_cli("paper-table --format json");
  REQUIRE(js.exit_code == 0);
  auto j = nlohmann::json::parse(js.out);
  const auto& rows = j.at("result").at("rows");
  REQUIRE(rows.size() == 9);
  CHECK(rows[0].at("h_min") == 4);
  CHECK(rows[0].at("lambda_brw_lower").get<double>() == 1.25);
  CHECK(rows[0].at("verdict") == "WEAK");
}

TEST_CASE("simulate outputs are thread-invariant") {
  auto dist = write_dist("d4b.json", R"({"type":"degenerate","d":4})");
  auto base = "simulate brw --dist " + dist +
              " --mu 1.3 --horizon 30 --trials 150 --pop-cap 50000 --seed 7";
  auto one = run_cli(base + " --threads 1");
  auto two = run_cli(base + " --threads 2");
  REQUIRE(one.exit_code == 0);
  REQUIRE(two.exit_code == 0);
  CHECK(body_of(one.out) == body_of(two.out));
  CHECK(one.out.substr(0, 1) == "#");
  CHECK(body_of(one.out).find("trial,seed,extinct") == 0);

  auto cp_base = "simulate cp --dist " + dist +
                 " --lambda 1.2 --t-max 8 --trials 100 --seed 9 --depth-cap 40"
                 " --max-infected 2000";
  auto cp1 = run_cli(cp_base + " --threads 1");
  auto cp2 = run_cli(cp_base + " --threads 2");
  REQUIRE(cp1.exit_code == 0);
  REQUIRE(cp2.exit_code == 0);
  CHECK(body_of(cp1.out) == body_of(cp2.out));

  // coupled variant emits one row per (trial, lambda)
  auto coupled = run_cli("simulate cp --dist " + dist +
                         " --lambdas 1.0,1.5 --t-max 6 --trials 20 --seed 4 --threads 1"
                         " --max-infected 2000");
  REQUIRE(coupled.exit_code == 0);
  int lines = 0;
  for (char ch : body_of(coupled.out))
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + 40);  // header + 20 trials x 2 lambdas
}

TEST_CASE("simulate brw writes files and respects --out") {
  auto dist = write_dist("d4c.json", R"({"type":"degenerate","d":4})");
  auto out = (scratch_dir() / "brw_rows.csv").string();
  auto res = run_cli("simulate brw --dist " + dist +
                     " --mu 1.2 --horizon 20 --trials 50 --seed 3 --out " + out);
  REQUIRE(res.exit_code == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("# ", 0) == 0);

  CHECK(run_cli("simulate brw --dist " + dist +
                " --mu 1.2 --horizon 5 --trials 5 --seed 3 --out /no/such/dir/x.csv")
            .exit_code == 3);
}

TEST_CASE("estimate-critical command on a coarse bracket") {
  auto dist = write_dist("d4d.json", R"({"type":"degenerate","d":4})");
  auto res = run_cli("estimate-critical --process brw --mode global --dist " + dist +
                     " --bracket 0.7,2.0 --tol 0.4 --trials 200 --seed 5 --horizon 40"
                     " --pop-cap 20000");
  REQUIRE(res.exit_code == 0);
  auto j = nlohmann::json::parse(res.out);
  const double lo = j.at("result").at("interval")[0].get<double>();
  const double hi = j.at("result").at("interval")[1].get<double>();
  // global BRW threshold is mu = 1
  CHECK(lo <= 1.1);
  CHECK(hi >= 0.9);
  CHECK(j.at("result").at("probes").size() >= 2);

  auto bad = run_cli("estimate-critical --process brw --mode global --dist " + dist +
                     " --bracket 1.2,1.2 --tol 0.1 --trials 100 --seed 5");
  CHECK(bad.exit_code == 1);
}
