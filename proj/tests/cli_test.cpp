#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "periph/cli.hpp"
#include "periph/io.hpp"

using namespace periph;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture(const std::string& name) { return std::string(PERIPH_FIXTURES) + "/" + name; }

std::vector<std::pair<double, double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,V");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / "periph_cli_test") {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(CliSolve, TwoCuspFixture) {
  const auto r = run({"--json", "solve", fixture("two_cusps.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto s = io::solution_from_json(io::Json::parse(r.out));
  EXPECT_NEAR(s.total, 5.0, 1e-12);
  EXPECT_EQ(s.active_set,
            (std::vector<ConstraintOrigin>{ConstraintOrigin::of_pair(0, 1), ConstraintOrigin::of_self(0)}));
}

TEST(CliSolve, TextOutput) {
  const auto r = run({"solve", fixture("two_cusps.json")});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("total:  5\n"), std::string::npos);
}

TEST(CliSolve, ErrorPaths) {
  EXPECT_EQ(run({"solve", fixture("malformed.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"solve", fixture("does_not_exist.json")}).code, cli::kUsage);
  const auto bad = run({"solve", fixture("contradictory.json")});
  EXPECT_EQ(bad.code, cli::kInfeasible);
  EXPECT_NE(bad.err.find("pair (0,1)"), std::string::npos);
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"--tol", "-1", "solve", fixture("two_cusps.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(CliSolve, GlobalFlagsAfterSubcommand) {
  const auto r = run({"solve", fixture("two_cusps.json"), "--json"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out.front(), '{');
}

TEST(CliClassify, Examples) {
  const auto sym = run({"--json", "classify", fixture("symmetric_cusps.json"), "--config", "1,1,1"});
  ASSERT_EQ(sym.code, cli::kOk) << sym.err;
  EXPECT_EQ(io::Json::parse(sym.out)["verdict"], "LocalMax");

  const auto chain = run({"--json", "classify", fixture("chain.json"), "--config-file", fixture("config_chain.json")});
  ASSERT_EQ(chain.code, cli::kOk) << chain.err;
  const auto doc = io::Json::parse(chain.out);
  EXPECT_EQ(doc["verdict"], "NotLocalMax");
  const auto& d = doc["evidence"]["deformation"];
  EXPECT_GT(d["total_after"].get<double>(), d["total_before"].get<double>());

  const auto loose = run({"classify", fixture("symmetric_cusps.json"), "--config", "0.5,0.5,0.5"});
  ASSERT_EQ(loose.code, cli::kOk);
  EXPECT_NE(loose.out.find("NotLocalMax"), std::string::npos);
}

TEST(CliClassify, ErrorPaths) {
  const auto infeasible = run({"classify", fixture("two_cusps.json"), "--config", "4,3"});
  EXPECT_EQ(infeasible.code, cli::kInfeasible);
  EXPECT_NE(infeasible.err.find("pair (0,1)"), std::string::npos);
  EXPECT_EQ(run({"classify", fixture("two_cusps.json"), "--config", "4"}).code, cli::kUsage);
  EXPECT_EQ(run({"classify", fixture("two_cusps.json"), "--config", "4,x"}).code, cli::kUsage);
  EXPECT_EQ(run({"classify", fixture("two_cusps.json")}).code, cli::kUsage);
  EXPECT_EQ(run({"classify", fixture("two_cusps.json"), "--config", "-1,1"}).code, cli::kUsage);
}

TEST(CliCurve, SymmetricTwoCusps) {
  const auto r = run({"curve", fixture("two_cusps.json"), "--config", "2,2", "--range=-0.1,0.1", "--samples", "21"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_NEAR(rows[k].second, rows[rows.size() - 1 - k].second, 1e-12);
  }
}

TEST(CliCurve, SingleCollarIncreasing) {
  const auto r = run({"curve", fixture("single_collar.json"), "--config", "0.5", "--range", "-0.2,0.2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_GT(rows[k].second, rows[k - 1].second);
}

TEST(CliCurve, ErrorPaths) {
  EXPECT_EQ(run({"curve", fixture("triple_tangency.json"), "--config", "2,2,2"}).code, cli::kUsage);
  const auto range = run({"curve", fixture("single_collar.json"), "--config", "0.5", "--range=-1,1"});
  EXPECT_EQ(range.code, cli::kInfeasible);
  EXPECT_NE(range.err.find("offending t = -1"), std::string::npos);
  EXPECT_EQ(run({"curve", fixture("single_collar.json"), "--config", "0.5", "--root", "3"}).code, cli::kUsage);
  EXPECT_EQ(run({"curve", fixture("single_collar.json"), "--config", "0.5", "--range", "1"}).code, cli::kUsage);
  EXPECT_EQ(run({"curve", fixture("two_cusps.json"), "--config", "4,3"}).code, cli::kInfeasible);
}

TEST(CliGen, DeterministicFiles) {
  TempDir dir;
  ASSERT_EQ(run({"gen", "--cusps", "2", "--seed", "7", "--out", dir.file("a.json")}).code, cli::kOk);
  ASSERT_EQ(run({"gen", "--cusps", "2", "--seed", "7", "--out", dir.file("b.json")}).code, cli::kOk);
  EXPECT_EQ(io::read_file(dir.file("a.json")), io::read_file(dir.file("b.json")));
  EXPECT_EQ(run({"gen", "--cusps", "2", "--seed", "7"}).out, io::read_file(dir.file("a.json")));
  EXPECT_EQ(run({"gen", "--cusps", "0", "--collars", "0"}).code, cli::kUsage);
  EXPECT_EQ(run({"gen", "--cusps", "1", "--density", "2"}).code, cli::kUsage);
}

TEST(CliGen, PipelineIntoSolve) {
  TempDir dir;
  for (int seed = 0; seed < 50; ++seed) {
    const std::string path = dir.file("m" + std::to_string(seed) + ".json");
    const auto gen = run({"gen", "--cusps", std::to_string(seed % 3), "--collars", std::to_string(1 + seed % 2),
                          "--seed", std::to_string(seed), "--out", path});
    ASSERT_EQ(gen.code, cli::kOk);
    const auto solve = run({"--json", "solve", path});
    ASSERT_EQ(solve.code, cli::kOk) << solve.err;
    const auto s = io::solution_from_json(io::Json::parse(solve.out));
    EXPECT_EQ(io::dump(io::to_json(s)) + "\n", solve.out);
  }
}

TEST(CliVerify, ExitCodes) {
  const auto ok = run({"verify", "--n", "2", "--instances", "10", "--seed", "1"});
  EXPECT_EQ(ok.code, cli::kOk) << ok.err;
  const auto json = run({"--json", "verify", "--n", "1", "--instances", "3"});
  ASSERT_EQ(json.code, cli::kOk);
  const auto doc = io::Json::parse(json.out);
  EXPECT_EQ(doc["passed"], 3);
  EXPECT_EQ(doc["reports"].size(), 3u);
  EXPECT_EQ(run({"verify", "--n", "5"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--n", "0"}).code, cli::kUsage);
  // An absurdly tight tolerance makes the coarse oracle disagree.
  const auto strict = run({"verify", "--n", "3", "--instances", "5", "--rel-tol", "1e-300"});
  EXPECT_EQ(strict.code, cli::kVerifyFailed);
  EXPECT_NE(strict.err.find("failing seeds:"), std::string::npos);
}
