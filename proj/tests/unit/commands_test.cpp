#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bermudan/cli/benchmarks.hpp"
#include "bermudan/cli/commands.hpp"
#include "bermudan/error.hpp"

using namespace bermudan;
using namespace bermudan::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bermudan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bermudan_cmd_" + name)).string();
}

std::string lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) kept += line + "\n";
  return kept;
}

class PriceCommand : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = temp_path("small.ini");
    std::ofstream(config_) << "[model]\npayoff = basket_put\ndimension = 2\nrate = 0.05\nvolatility = 0.2\n"
                              "strike = 100\nspot = 100\nmaturity = 1\nexercise_dates = 3\ntime_step = 0.05\n"
                              "[sampling]\ntrain_paths = 300\nlower_paths = 2000\nupper_paths = 1000\nseed = 11\n";
  }
  void TearDown() override { std::remove(config_.c_str()); }

  std::string config_;
};

}  // namespace

TEST(VerifyCommand, PassesOnTheFixtures) {
  const auto r = invoke({"verify", "--random-lattices", "10"});
  EXPECT_EQ(r.code, kSuccess) << r.out << r.err;
  EXPECT_NE(r.out.find("OK "), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL "), std::string::npos);
}

TEST(VerifyCommand, FaultInjectionIsDetected) {
  const auto r = invoke({"verify", "--fixtures", "optimal_not_sure,random", "--random-lattices", "10", "--fault-inject"});
  EXPECT_EQ(r.code, kPropertyFailure) << r.out;
  EXPECT_NE(r.out.find("FAIL "), std::string::npos);
  EXPECT_NE(r.out.find("FAILED "), std::string::npos);
}

TEST(VerifyCommand, RejectsUnknownFixture) {
  const auto r = invoke({"verify", "--fixtures", "nonsense"});
  EXPECT_EQ(r.code, kValidationFailure);
  EXPECT_NE(r.err.find("unknown fixture group 'nonsense'"), std::string::npos);
}

TEST(VerifyCommand, ChecksALatticeFile) {
  const std::string path = temp_path("tree.lat");
  std::ofstream(path) << "lattice v1\nhorizon 1\nnode 0 0 - 1 1 0\nnode 1 0 0 0.5 2 1\nnode 1 1 0 0.5 0 -1\n";
  const auto r = invoke({"verify", "--fixtures", "optimal_not_sure", "--lattice", path});
  std::remove(path.c_str());
  EXPECT_EQ(r.code, kSuccess) << r.out << r.err;
  EXPECT_NE(r.out.find("Y*_0 = 1"), std::string::npos) << r.out;
}

TEST(Commands, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kValidationFailure);
  EXPECT_EQ(invoke({"frobnicate"}).code, kValidationFailure);
  EXPECT_EQ(invoke({"price"}).code, kValidationFailure);
  const auto missing = invoke({"price", "--config", temp_path("absent.ini")});
  EXPECT_EQ(missing.code, kValidationFailure);
  EXPECT_NE(missing.err.find("cannot open config"), std::string::npos);
  EXPECT_EQ(invoke({"bench", "--table", "straddle"}).code, kValidationFailure);
  EXPECT_EQ(invoke({"bench", "--table", "basket_put", "--cells", "J=4"}).code, kValidationFailure);
  EXPECT_EQ(invoke({"bench", "--table", "basket_put", "--paths-scale", "0"}).code, kValidationFailure);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
}

TEST_F(PriceCommand, BadConfigExitsWithValidationFailure) {
  std::ofstream(config_, std::ios::app) << "bogus = 1\n";
  const auto r = invoke({"price", "--config", config_});
  EXPECT_EQ(r.code, kValidationFailure);
  EXPECT_NE(r.err.find("unknown key 'bogus' in [sampling]"), std::string::npos) << r.err;
}

TEST_F(PriceCommand, DeterministicRunsAreByteIdentical) {
  for (const char* format : {"table", "csv", "records"}) {
    const auto a = invoke({"price", "--config", config_, "--deterministic", "--format", format});
    const auto b = invoke({"price", "--config", config_, "--deterministic", "--format", format});
    ASSERT_EQ(a.code, kSuccess) << a.err;
    EXPECT_FALSE(a.out.empty());
    EXPECT_EQ(a.out, b.out) << format;
  }
  const auto table = invoke({"price", "--config", config_, "--deterministic"});
  EXPECT_EQ(table.out.find("seconds"), std::string::npos);
  EXPECT_NE(lines_starting(table.out, "   lower "), "");
  const auto reseeded = invoke({"price", "--config", config_, "--deterministic", "--seed", "12"});
  EXPECT_NE(lines_starting(reseeded.out, "   lower "), lines_starting(table.out, "   lower "));
}

TEST_F(PriceCommand, TimingsAppearWithoutDeterministicFlag) {
  const auto r = invoke({"price", "--config", config_});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  EXPECT_NE(r.out.find("seconds"), std::string::npos);
}

TEST_F(PriceCommand, StoredCoefficientsReproduceTheBounds) {
  const std::string coeffs = temp_path("coeffs.json");
  const auto trained = invoke({"price", "--config", config_, "--deterministic", "--coeffs-out", coeffs});
  ASSERT_EQ(trained.code, kSuccess) << trained.err;
  const auto reused = invoke({"price", "--config", config_, "--deterministic", "--coeffs-in", coeffs});
  ASSERT_EQ(reused.code, kSuccess) << reused.err;
  EXPECT_EQ(lines_starting(reused.out, "   lower "), lines_starting(trained.out, "   lower "));
  EXPECT_EQ(lines_starting(reused.out, "   upper "), lines_starting(trained.out, "   upper "));

  std::ofstream(config_, std::ios::app) << "[basis]\ndegree = 2\n";
  const auto mismatched = invoke({"price", "--config", config_, "--coeffs-in", coeffs});
  EXPECT_NE(mismatched.code, kSuccess);
  std::remove(coeffs.c_str());
}

TEST_F(PriceCommand, ReportGoesToTheOutPath) {
  const std::string report = temp_path("report.csv");
  const auto r = invoke({"price", "--config", config_, "--deterministic", "--format", "csv", "--out", report});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(report);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("cell,config_hash,payoff", 0), 0u) << header;
  in.close();
  std::remove(report.c_str());
}

TEST(RunPricing, CoefficientsRoundTripThroughTheRequest) {
  PricingRequest request;
  auto& m = request.config.model;
  m.payoff = PayoffKind::max_call;
  m.dimension = 2;
  m.rate = 0.05;
  m.dividend = 0.1;
  m.volatility = 0.2;
  m.strike = 100;
  m.spot = {100, 100};
  m.maturity = 1;
  m.exercise_dates = 2;
  m.time_step = 0.1;
  request.config.sampling = {200, 500, 300, 3, 128};
  const PricingResult first = run_pricing(request);
  ASSERT_TRUE(first.report.ok());
  request.coefficients = first.coefficients;
  const PricingResult second = run_pricing(request);
  ASSERT_TRUE(second.report.ok());
  EXPECT_EQ(second.report.lower->estimate, first.report.lower->estimate);
  EXPECT_EQ(second.report.upper->estimate, first.report.upper->estimate);
  EXPECT_EQ(second.report.upper->standard_error, first.report.upper->standard_error);
}

TEST(Benchmarks, Grids) {
  const auto put = benchmark_cells(PayoffKind::basket_put);
  ASSERT_EQ(put.size(), 9u);
  const auto call = benchmark_cells(PayoffKind::max_call);
  ASSERT_EQ(call.size(), 6u);
  for (const auto& c : put) {
    EXPECT_EQ(c.config.model.dimension, 5u);
    EXPECT_EQ(c.config.model.dividend, 0.0);
    EXPECT_EQ(c.config.sampling.train_paths, 1000u);
    EXPECT_EQ(c.config.sampling.lower_paths, 300000u);
    EXPECT_EQ(c.config.sampling.upper_paths, 100000u);
    EXPECT_TRUE(c.reference.has_value());
    EXPECT_NO_THROW(c.config.validate());
  }
  for (const auto& c : call) {
    EXPECT_EQ(c.config.model.dividend, 0.1);
    EXPECT_EQ(c.config.model.exercise_dates, 9u);
    EXPECT_EQ(c.config.grid().substeps(), 34u);
  }
  EXPECT_EQ(put[0].label, "J=3,x0=90");
  EXPECT_EQ(call[5].label, "D=5,x0=110");
  EXPECT_EQ(call[5].reference->upper, 37.0856);
  EXPECT_EQ(put[4].reference->lower, 2.407);
}

TEST(Benchmarks, FiltersAndScaling) {
  const auto put = benchmark_cells(PayoffKind::basket_put, 5, 0.1);
  EXPECT_EQ(put[0].config.sampling.lower_paths, 30000u);
  EXPECT_EQ(put[0].config.sampling.upper_paths, 10000u);
  EXPECT_EQ(put[0].config.sampling.train_paths, 1000u);
  EXPECT_EQ(put[0].config.sampling.seed, 5u);
  EXPECT_EQ(benchmark_cells(PayoffKind::basket_put, 5, 1e-9)[0].config.sampling.lower_paths, 2u);
  EXPECT_EQ(filter_cells(put, "").size(), 9u);
  EXPECT_EQ(filter_cells(put, "J=3").size(), 3u);
  EXPECT_EQ(filter_cells(put, "x0=110").size(), 3u);
  const auto one = filter_cells(put, "J=6,x0=100");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].index, 4u);
  EXPECT_TRUE(filter_cells(put, "J=4").empty());
  EXPECT_THROW(filter_cells(put, "D=2"), ValidationError);
  EXPECT_EQ(RunStreams::for_cell(2).train, 9u);
  EXPECT_EQ(RunStreams::for_cell(2).upper, 11u);
}
