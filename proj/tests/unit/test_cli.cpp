#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "measurelab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return mlab::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("measurelab_cli_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(dir); }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  Scratch s;
  CHECK(run({}) == mlab::cli::kInvalid);
  CHECK(run({"no-such-command"}) == mlab::cli::kInvalid);
  CHECK(run({"kernel", "--d", "4", "--out", s("k.csv")}) == mlab::cli::kInvalid);
  CHECK(run({"kernel", "--N", "7", "--out", s("k.csv")}) == mlab::cli::kInvalid);
  CHECK(run({"kernel", "--N", "16", "--out", s("missing/k.csv")}) == mlab::cli::kInvalid);
  CHECK(run({"bohr", "zn-probe", "--r", "0.5", "--out", s("z.csv")}) == mlab::cli::kInvalid);
  CHECK(run({"bohr", "zn-probe", "--r", "1", "--out", s("z.csv")}) == mlab::cli::kInvalid);
  CHECK(!fs::exists(s("z.csv")));
}

TEST_CASE("kernel CSV") {
  Scratch s;
  REQUIRE(run({"kernel", "--N", "16", "--L", "8", "--out", s("k.csv")}) == mlab::cli::kOk);
  const auto text = slurp(s("k.csv"));
  CHECK(text.rfind("x,kernel\n# command=kernel\n", 0) == 0);
  CHECK(text.find("# N=16\n") != std::string::npos);
  CHECK(text.find("\n-4,") != std::string::npos);
}

TEST_CASE("identical config and seed give identical bytes") {
  Scratch s;
  const std::vector<std::string> sample = {"sample", "--d", "2", "--N", "8", "--L", "4", "--seed", "9"};
  auto a = sample, b = sample;
  a.insert(a.end(), {"--out", s("a.csv")});
  b.insert(b.end(), {"--out", s("b.csv")});
  REQUIRE(run(a) == 0);
  REQUIRE(run(b) == 0);
  CHECK(slurp(s("a.csv")) == slurp(s("b.csv")));

  REQUIRE(run({"bohr", "zn-probe", "--r", "1/2", "--n-max", "10", "--samples", "20000", "--seed", "7", "--out", s("z1.csv")}) == 0);
  REQUIRE(run({"bohr", "zn-probe", "--r", "1/2", "--n-max", "10", "--samples", "20000", "--seed", "7", "--out", s("z2.csv")}) == 0);
  CHECK(slurp(s("z1.csv")) == slurp(s("z2.csv")));
  CHECK(slurp(s("z1.csv")).find("\n3,1/8,0.125,") != std::string::npos);
}

TEST_CASE("config file: flags win, unknown keys rejected") {
  Scratch s;
  std::ofstream(s("cfg.json")) << R"({"N": 16, "L": 4, "m": 2.5})";
  REQUIRE(run({"kernel", "--config", s("cfg.json"), "--N", "32", "--out", s("k.csv")}) == 0);
  const auto text = slurp(s("k.csv"));
  CHECK(text.find("# N=32\n") != std::string::npos);
  CHECK(text.find("# L=4\n") != std::string::npos);
  CHECK(text.find("# m=2.5\n") != std::string::npos);

  std::ofstream(s("bad.json")) << R"({"N": 16, "colour": "red"})";
  CHECK(run({"kernel", "--config", s("bad.json"), "--out", s("k2.csv")}) == mlab::cli::kInvalid);

  std::ofstream(s("list.json")) << R"({"beta": [0.1, 0.3], "N": [8, 16, 32]})";
  REQUIRE(run({"uv-scan", "--config", s("list.json"), "--d", "1", "--out", s("uv.csv")}) != mlab::cli::kInvalid);
  CHECK(slurp(s("uv.csv")).find("# N=8,16,32\n") != std::string::npos);
}

TEST_CASE("scans write data and summary files") {
  Scratch s;
  CHECK(run({"uv-scan", "--d", "1", "--out", s("uv.csv")}) == 0);
  CHECK(slurp(s("uv.summary.csv")).rfind("param,slope,slope_err,verdict\n", 0) == 0);
  CHECK(run({"ir-scan", "--d", "1", "--out", s("ir.csv")}) == 0);
  CHECK(run({"hs-scan", "--d", "1", "--out", s("hs.csv")}) == 0);
  CHECK(slurp(s("hs.csv")).rfind("param,size,statistic,stderr\n", 0) == 0);
}

TEST_CASE("output directory from the environment") {
  Scratch s;
  ::setenv("MEASURELAB_OUT_DIR", s.dir.c_str(), 1);
  const int rc = run({"kernel", "--N", "8", "--L", "4", "--out", "env.csv"});
  ::unsetenv("MEASURELAB_OUT_DIR");
  CHECK(rc == 0);
  CHECK(fs::exists(s.dir / "env.csv"));
}

TEST_CASE("checks that fail exit 2") {
  Scratch s;
  // too coarse to resolve the divergence: the probe is not DIVERGENT
  CHECK(run({"singular-probe", "--d", "1", "--N", "4,6,8", "--replicas", "100", "--out", s("p.csv")}) ==
        mlab::cli::kCheckFailed);
  CHECK(fs::exists(s("p.csv")));
  CHECK(run({"singular-probe", "--d", "1", "--N", "64,128,256,512", "--replicas", "200", "--out", s("q.csv")}) == 0);
}

TEST_CASE("bohr subcommands") {
  Scratch s;
  REQUIRE(run({"bohr", "independence", "--basis", "u1,u2", "--vector", "1,0", "--vector", "0,1", "--vector", "1,1",
               "--out", s("i.json")}) == 0);
  auto doc = nlohmann::json::parse(slurp(s("i.json")));
  CHECK(doc["rank"] == 2);
  CHECK(doc["independent"] == false);
  CHECK(doc["witness"] == nlohmann::json::parse("[1, 1, -1]"));

  std::ofstream(s("set.json")) << R"({"basis": ["1", "sqrt2"], "vectors": [["1/2", "0"], ["0", "1/3"]]})";
  REQUIRE(run({"bohr", "independence", "--input", s("set.json"), "--out", s("j.json")}) == 0);
  CHECK(nlohmann::json::parse(slurp(s("j.json")))["independent"] == true);

  CHECK(run({"bohr", "pushforward", "--out", s("pf.json")}) == 0);
  CHECK(nlohmann::json::parse(slurp(s("pf.json")))["passed"] == true);

  std::ofstream(s("fam.json")) << R"({"basis": ["a", "b"], "gamma": [["2", "0"]], "gamma_prime": [["1", "0"]],
                                     "terms": [{"m": [1], "c": "1,0"}, {"m": [0], "c": "3,0"}]})";
  CHECK(run({"bohr", "pushforward", "--input", s("fam.json"), "--out", s("pf2.json")}) == 0);
  std::ofstream(s("notref.json")) << R"({"basis": ["a"], "gamma": [["1/2"]], "gamma_prime": [["1"]],
                                        "terms": [{"m": [1], "c": "1,0"}]})";
  CHECK(run({"bohr", "pushforward", "--input", s("notref.json"), "--out", s("pf3.json")}) == mlab::cli::kInvalid);

  CHECK(run({"bohr", "zn-probe", "--arc", "0:1/4", "--arc", "1/2:3/4", "--n-max", "6", "--out", s("arc.csv")}) == 0);
  CHECK(run({"bohr", "ergodic-check", "--trials", "200", "--out", s("e.json")}) == 0);

  std::ofstream(s("psi.json")) << R"({"basis": ["1"], "terms": [{"k": ["1"], "c": "1"}, {"k": ["-1"], "c": "1"}]})";
  REQUIRE(run({"bohr", "ergodic-check", "--input", s("psi.json"), "--lambda", "-1", "--out", s("r.json")}) == 0);
  CHECK(nlohmann::json::parse(slurp(s("r.json")))["invariant"] == true);
  CHECK(run({"bohr", "ergodic-check", "--input", s("psi.json"), "--lambda", "0", "--out", s("r0.json")}) ==
        mlab::cli::kInvalid);
}

TEST_CASE("suite subset") {
  Scratch s;
  CHECK(run({"suite", "--only", "1,10", "--out", s("suite.csv")}) == 0);
  const auto text = slurp(s("suite.csv"));
  CHECK(text.rfind("criterion,title,passed,seconds,budget_seconds\n", 0) == 0);
  CHECK(run({"suite", "--only", "12"}) == mlab::cli::kInvalid);
}
