#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "matern");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = matern::tools::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("matern_cli_test_" + name);
}

TEST(Cli, EvalPrintsCorrelation) {
  const auto r = run({"eval", "--nu", "0.5", "--rho", "1", "--d", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "0.3678794");
  EXPECT_NE(r.out.find("log_scale=false"), std::string::npos);
}

TEST(Cli, EvalJsonAndParametrization) {
  const auto r = run({"eval", "--nu", "4", "--scale", "0.5", "--param", "decay", "--d", "0", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = matern::io::Json::parse(r.out);
  EXPECT_EQ(j["correlation"].get<double>(), 1.0);
  EXPECT_FALSE(j.contains("parts"));
  EXPECT_EQ(j["params"]["parametrization"], "decay");
}

TEST(Cli, FlagErrorsExitTwo) {
  EXPECT_EQ(run({"eval", "--nu", "0", "--rho", "1", "--d", "1"}).code, 2);
  EXPECT_EQ(run({"eval", "--nu", "-3"}).code, 2);
  EXPECT_EQ(run({"eval", "--bogus"}).code, 2);
  EXPECT_EQ(run({"eval", "--param", "weird"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"table", "swap-diff", "--pairs", "1:x"}).code, 2);
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, NumericFailureExitsOne) {
  EXPECT_EQ(run({"eval", "--nu", "9", "--rho", "1", "--d", "1e-40"}).code, 1);
}

TEST(Cli, SwapDiffDefaultHasZeroControlRow) {
  const auto r = run({"table", "swap-diff", "--pairs", "default", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("nu,rho,min_diff,max_diff\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n1,1,0,0\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n1.5,1,"), std::string::npos);
  EXPECT_NE(r.out.find("# grid="), std::string::npos);
}

TEST(Cli, SurfaceOriginIsOne) {
  const auto r = run({"surface", "--nu", "1.5", "--rho", "5"});
  ASSERT_EQ(r.code, 0);
  const auto j = matern::io::Json::parse(r.out);
  const std::size_t mid = j["x"].size() / 2;
  EXPECT_EQ(j["z"][mid][mid].get<double>(), 1.0);
  EXPECT_EQ(j["params"]["nu"].get<double>(), 1.5);
}

TEST(Cli, SurfaceToFile) {
  const auto path = temp_file("surface.csv");
  const auto r = run({"surface", "--nu", "0.5", "--rho", "1", "--resolution", "5", "--format", "csv", "-o", path.string()});
  ASSERT_EQ(r.code, 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("# resolution=5"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, MseTable) {
  const auto r = run({"table", "mse", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\n1,0\n"), std::string::npos);
}

TEST(Cli, JointCov) {
  const auto r = run({"jointcov", "--kappa11", "75", "--kappa21", "1.5", "--grid-n", "11", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = matern::io::Json::parse(r.out);
  EXPECT_EQ(j["z"].size(), 22u);
}

TEST(Cli, SimulateDeterministic) {
  const std::vector<std::string> args{"simulate", "--nu", "1.5", "--rho", "0.3", "--n", "25", "--seed", "9",
                                      "--format", "csv"};
  const auto a = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run(args).out);
  EXPECT_NE(a.out.find("# seed=9"), std::string::npos);
}

TEST(Cli, FitFromDataFile) {
  const auto data = temp_file("fit.csv");
  {
    const auto sim = run({"simulate", "--nu", "0.5", "--scale", "4", "--param", "decay", "--n", "60", "--lo", "0",
                          "--hi", "1", "--seed", "4", "--format", "csv"});
    ASSERT_EQ(sim.code, 0);
    std::ofstream out(data);
    std::istringstream lines(sim.out);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("x,", 0) == 0) line = "x,y";
      out << line << "\n";
    }
  }
  const auto r = run({"fit", "--data", data.string(), "--nu-fixed", "0.5"});
  std::filesystem::remove(data);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = matern::io::Json::parse(r.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_EQ(j["n"].get<int>(), 60);
}

TEST(Cli, RidgeCsv) {
  const auto r = run({"ridge", "--n", "40", "--steps", "5", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sigma2,kappa,nll,leg\n"), std::string::npos);
  EXPECT_NE(r.out.find(",along\n"), std::string::npos);
  EXPECT_NE(r.out.find(",across_x2\n"), std::string::npos);
}

TEST(Cli, ConfigFileSuppliesDefaults) {
  const auto cfg = temp_file("config.ini");
  {
    std::ofstream out(cfg);
    out << "[eval]\nnu=1.5\nrho=2\nd=2\n";
  }
  const auto r = run({"--config", cfg.string(), "eval"});
  std::filesystem::remove(cfg);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "0.7357589");
}

TEST(Cli, DefaultPortFromEnvironment) {
  ::setenv("MATERN_PORT", "9123", 1);
  EXPECT_EQ(matern::tools::default_port(), 9123);
  ::setenv("MATERN_PORT", "junk", 1);
  EXPECT_EQ(matern::tools::default_port(), 8080);
  ::unsetenv("MATERN_PORT");
}

}  // namespace
