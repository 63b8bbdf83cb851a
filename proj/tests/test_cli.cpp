#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fig1_golden.hpp"
#include "selectlab/io.hpp"

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + SELECTLAB_CLI + std::string(" ") + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int w = pclose(p);
  r.status = WIFEXITED(w) ? WEXITSTATUS(w) : -1;
  return r;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("moments as json") {
  const Result r = run("moments --kmax 3 --format json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["1"] == "1/2");
  CHECK(j["2"] == "4/15");
  CHECK(j["3"] == "187/1260");
  CHECK(j.size() == 3);
}

TEST_CASE("moments as csv carry decimal and fraction") {
  const Result r = run("moments --kmax 2");
  REQUIRE(r.status == 0);
  CHECK(r.out == "k,value,fraction\n1,0.5,1/2\n2,0.266666666666667,4/15\n");
}

TEST_CASE("samples are deterministic and in [0,1]") {
  const Result a = run("sample --count 1000 --seed 7");
  const Result b = run("sample --count 1000 --seed 7");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  const auto lines = lines_of(a.out);
  REQUIRE(lines.size() == 1001);
  CHECK(lines[0] == "x");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double v = std::stod(lines[i]);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(run("sample --count 1000 --seed 8").out != a.out);
  CHECK(run("sample --count 1000 --seed 7 --threads 3").out == a.out);
}

TEST_CASE("sample summary and binary export") {
  const Result r = run("sample --count 2000 --format json --seed 3");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["count"] == 2000);
  CHECK(std::abs(j["mean"].get<double>() - 0.5) < 0.02);
  CHECK(j["min"].get<double>() >= 0.0);
  CHECK(j["max"].get<double>() <= 1.0);
  CHECK(j.contains("variance"));
  CHECK(j.contains("mean_tau"));

  const std::string path = "cli_sample_test.bin";
  REQUIRE(run("sample --count 50 --seed 3 --format binary --out " + path).status == 0);
  std::ifstream in(path, std::ios::binary);
  const std::vector<double> values = selectlab::io::read_binary(in);
  REQUIRE(values.size() == 50);
  const auto csv = lines_of(run("sample --count 50 --seed 3").out);
  for (std::size_t i = 0; i < 50; ++i) CHECK(selectlab::io::decimal(values[i]) == csv[i + 1]);
  std::remove(path.c_str());
}

TEST_CASE("seed precedence: flag, then environment, then default") {
  const std::string dflt = run("run --n 50 --runs 5").out;
  const std::string env = run("run --n 50 --runs 5", "SELECTLAB_SEED=5").out;
  const std::string flag = run("run --n 50 --runs 5 --seed 5").out;
  const std::string both = run("run --n 50 --runs 5 --seed 5", "SELECTLAB_SEED=6").out;
  const std::string explicit_default = run("run --n 50 --runs 5 --seed 20130801").out;
  CHECK(env == flag);
  CHECK(both == flag);
  CHECK(dflt != flag);
  CHECK(dflt == explicit_default);
  CHECK(run("run --n 5 --runs 1", "SELECTLAB_SEED=abc").status == 2);
}

TEST_CASE("run csv schema") {
  const Result r = run("run --n 20 --runs 3 --seed 1");
  REQUIRE(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "n,rank,exchanges,normalized");
  CHECK(lines[1].rfind("20,", 0) == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").status == 2);
  CHECK(run("no-such-command").status == 2);
  CHECK(run("moments --bogus").status == 2);
  CHECK(run("moments --format xml").status == 2);
  CHECK(run("enumerate --n 12").status == 2);
  CHECK(run("run --n 0").status == 2);
  CHECK(run("constants --eps 0.5").status == 2);
}

TEST_CASE("non-convergence is a consistency failure") {
  CHECK(run("cdf --grid 256 --max-iter 2").status == 1);
  CHECK(run("density --grid 256 --max-iter 2").status == 1);
}

TEST_CASE("help for every subcommand lists defaults") {
  CHECK(run("--help").status == 0);
  for (const char* sub : {"partition-dist", "run", "exact-mean", "moves", "moments", "cdf", "density",
                          "sample", "kernel-check", "converge", "constants", "enumerate", "tail",
                          "derivative"}) {
    CAPTURE(sub);
    const Result r = run(std::string(sub) + " --help");
    CHECK(r.status == 0);
    CHECK(r.out.find("[csv]") != std::string::npos);
    CHECK(r.out.find("20130801") != std::string::npos);
  }
  const std::string cv = run("converge --help").out;
  CHECK(cv.find("[100,1000,10000]") != std::string::npos);
  CHECK(cv.find("[100000]") != std::string::npos);
  CHECK(cv.find("[4096]") != std::string::npos);
  const std::string mv = run("moves --help").out;
  CHECK(mv.find("[10000]") != std::string::npos);
  CHECK(mv.find("[100000]") != std::string::npos);
  const std::string kc = run("kernel-check --help").out;
  CHECK(kc.find("[1000000]") != std::string::npos);
}

TEST_CASE("fig1 table") {
  const Result r = run("cdf --grid 4096 --tol 1e-7 --fig1");
  REQUIRE(r.status == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == "t,0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7");
  for (int row = 0; row < 20; ++row) {
    std::istringstream is(lines[row + 1]);
    std::string cell;
    std::getline(is, cell, ',');
    char label[16];
    std::snprintf(label, sizeof label, "%.3f", row / 200.0);
    CHECK(cell == label);
    for (int c = 0; c < 8; ++c) {
      REQUIRE(std::getline(is, cell, ','));
      CHECK(cell.size() == 6);
      CHECK(std::abs(std::stod(cell) - kFig1Golden[row][c]) < 5e-4);
    }
  }
}

TEST_CASE("exact outputs") {
  const auto em = nlohmann::json::parse(run("exact-mean --n 4 --format json").out);
  CHECK(em["1"] == "0");
  CHECK(em["4"] == "73/48");
  const auto at = nlohmann::json::parse(run("exact-mean --at 8,3 --format json").out);
  CHECK(at["8"] == "117421/32256");
  CHECK(at["3"] == "1");
  const auto fl = lines_of(run("exact-mean --n 3 --float").out);
  CHECK(fl.back() == "3,1");

  const auto pd = nlohmann::json::parse(run("partition-dist --n 5 --format json").out);
  CHECK(pd["split"]["1"] == "2/5");
  CHECK(pd["swaps_given_split"]["1"]["0"] == "1/2");
  CHECK(pd["first_pass_mean"] == "1");

  const auto en = nlohmann::json::parse(run("enumerate --n 3 --format json").out);
  CHECK(en["permutations"] == 6);
  CHECK(en["joint"][1][0] == 2);
  CHECK(en["joint"][1][1] == 2);
  CHECK(en["joint"][2][1] == 2);

  const auto mv = nlohmann::json::parse(run("moves --n 2,10 --runs 0 --format json").out);
  CHECK(mv["rows"][0]["expected_moves"] == "3/2");
  CHECK(mv["rows"][0]["twice_exchanges"] == "1");
  CHECK_FALSE(mv["rows"][0].contains("runs"));
}

TEST_CASE("constants, tail and derivative") {
  const auto co = nlohmann::json::parse(run("constants --format json").out);
  CHECK(std::abs(co["omega_eps"].get<double>() - 92.3) < 0.1);
  CHECK(std::abs(co["tau_p"].get<double>() - 0.8133) < 1e-4);
  const auto co2 = nlohmann::json::parse(run("constants --p 2 --format json").out);
  CHECK(std::abs(co2["kappa_p"].get<double>() - 18.354) < 1e-3);

  const auto ta = nlohmann::json::parse(run("tail --eps 0.05 --k 2 --count 2000 --format json").out);
  CHECK(std::abs(ta["bound"].get<double>() - 0.2828) < 1e-4);
  CHECK(ta["empirical"].get<double>() <= ta["bound"].get<double>());

  const auto de = nlohmann::json::parse(run("derivative --format json").out);
  CHECK(std::abs(de["value"].get<double>() - 0.911364) < 1e-3);
  CHECK(de["flagged"] == false);
}

TEST_CASE("small experiments through the CLI") {
  const Result cv = run("converge --n 50,200 --runs 2000 --grid 512");
  REQUIRE(cv.status == 0);
  const auto lines = lines_of(cv.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "n,runs,ks,mean,nvar");
  CHECK(run("converge --n 50,200 --runs 2000 --grid 512").out == cv.out);

  const Result kc = run("kernel-check --x 0.3 --runs 20000 --format json");
  REQUIRE(kc.status == 0);
  const auto j = nlohmann::json::parse(kc.out);
  CHECK(j["checks"][0]["passed"] == true);

  const Result den = run("density --grid 256");
  REQUIRE(den.status == 0);
  CHECK(lines_of(den.out).size() == 258);
  CHECK(lines_of(den.out)[0] == "t,f");
}
