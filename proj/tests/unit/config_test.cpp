#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bermudan/cli/config.hpp"
#include "bermudan/error.hpp"

using namespace bermudan;
using namespace bermudan::cli;

namespace {

const char* kIni = R"(# five asset put
[model]
payoff = basket_put
dimension = 5
rate = 0.05
volatility = 0.2
strike = 100
spot = 100
maturity = 3
exercise_dates = 3

[sampling]
train_paths = 500
lower_paths = 2000
upper_paths = 1000
seed = 7
)";

const char* kJson = R"({
  "sampling": {"seed": 7, "upper_paths": 1000, "lower_paths": 2000, "train_paths": 500},
  "model": {"exercise_dates": 3, "maturity": 3, "spot": [100, 100, 100, 100, 100], "strike": 100,
            "volatility": 0.2, "rate": 0.05, "dimension": 5, "payoff": "basket_put"}
})";

RunConfig ini(const std::string& text) {
  std::istringstream in(text);
  return parse_ini(in, "cfg");
}

std::string ini_error(const std::string& text) {
  try {
    ini(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "no error";
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

}  // namespace

TEST(Config, ParsesTextFormat) {
  const RunConfig c = ini(kIni);
  EXPECT_EQ(c.model.payoff, PayoffKind::basket_put);
  EXPECT_EQ(c.model.dimension, 5u);
  ASSERT_EQ(c.model.spot.size(), 5u);
  for (double s : c.model.spot) EXPECT_EQ(s, 100.0);
  EXPECT_EQ(c.model.dividend, 0.0);
  EXPECT_EQ(c.model.time_step, 0.01);
  EXPECT_EQ(c.basis.options.degree, 3u);
  EXPECT_TRUE(c.basis.standardize);
  EXPECT_EQ(c.sampling.train_paths, 500u);
  EXPECT_EQ(c.sampling.seed, 7u);
  EXPECT_EQ(c.grid().substeps(), 100u);
  EXPECT_EQ(c.output.format, ReportFormat::table);
}

TEST(Config, JsonAndTextAgree) {
  std::istringstream in(kJson);
  const RunConfig j = parse_json(in, "cfg.json");
  const RunConfig t = ini(kIni);
  EXPECT_EQ(j.canonical(), t.canonical());
  EXPECT_EQ(j.hash(), t.hash());
}

TEST(Config, HashIgnoresLayoutAndOutput) {
  const std::string shuffled = R"(
[sampling]
seed=7 ; trailing comment
upper_paths   =   1000
lower_paths = 2000
train_paths = 500
[model]
spot = 100,100,100,100,100
exercise_dates = 3
maturity = 3.0
strike = 1e2
volatility = 0.20
rate = 0.05
dimension = 5
payoff = basket_put
[output]
format = csv
)";
  EXPECT_EQ(ini(shuffled).hash(), ini(kIni).hash());
}

TEST(Config, HashTracksSettings) {
  const auto base = ini(kIni).hash();
  EXPECT_NE(ini(replace(kIni, "seed = 7", "seed = 8")).hash(), base);
  EXPECT_NE(ini(replace(kIni, "volatility = 0.2", "volatility = 0.25")).hash(), base);
  EXPECT_NE(ini(replace(kIni, "spot = 100", "spot = 100,100,100,100,101")).hash(), base);
  EXPECT_NE(ini(std::string(kIni) + "[basis]\nridge = 1e-8\n").hash(), base);
}

TEST(Config, SubstepsOverrideTimeStep) {
  const RunConfig c = ini(replace(kIni, "exercise_dates = 3", "exercise_dates = 3\nsubsteps = 7"));
  EXPECT_EQ(c.grid().substeps(), 7u);
  const RunConfig d = ini(replace(kIni, "exercise_dates = 3", "exercise_dates = 9"));
  EXPECT_EQ(d.grid().substeps(), 34u);
}

TEST(Config, MissingRequiredKey) {
  EXPECT_EQ(ini_error(replace(kIni, "volatility = 0.2\n", "")), "cfg: [model] missing required key 'volatility'");
  EXPECT_EQ(ini_error("[sampling]\nseed = 1\n"), "cfg: missing section [model]");
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_EQ(ini_error(replace(kIni, "rate = 0.05", "rate = abc")),
            "cfg:5: [model] rate: expected a number, got 'abc'");
  EXPECT_EQ(ini_error(replace(kIni, "strike = 100", "strik = 100")), "cfg:7: unknown key 'strik' in [model]");
  EXPECT_EQ(ini_error(replace(kIni, "strike = 100", "strike = 100\nstrike = 90")), "cfg:8: duplicate key 'strike'");
  EXPECT_EQ(ini_error(replace(kIni, "dimension = 5", "dimension = -5")),
            "cfg:4: [model] dimension: expected a nonnegative integer, got '-5'");
  EXPECT_EQ(ini_error(replace(kIni, "spot = 100", "spot = 100,100")),
            "cfg:8: [model] spot: has 2 values but dimension is 5");
  EXPECT_EQ(ini_error(replace(kIni, "[sampling]", "[samples]")), "cfg:12: unknown section [samples]");
  EXPECT_EQ(ini_error(replace(kIni, "rate = 0.05", "rate 0.05")), "cfg:5: expected 'key = value'");
  EXPECT_EQ(ini_error(std::string("seed = 3\n") + kIni), "cfg:1: key outside of any section");
  EXPECT_NE(ini_error(replace(kIni, "payoff = basket_put", "payoff = straddle")).find("cfg:3: [model] payoff"),
            std::string::npos);
}

TEST(Config, SemanticValidation) {
  EXPECT_NE(ini_error(replace(kIni, "volatility = 0.2", "volatility = -0.2")), "no error");
  EXPECT_NE(ini_error(replace(kIni, "train_paths = 500", "train_paths = 1")), "no error");
  EXPECT_NE(ini_error(replace(kIni, "exercise_dates = 3", "exercise_dates = 0")), "no error");
  EXPECT_NE(ini_error(replace(kIni, "maturity = 3", "maturity = 0")), "no error");
  EXPECT_NE(ini_error(std::string(kIni) + "[basis]\nridge = -1\n"), "no error");
  EXPECT_NE(ini_error(std::string(kIni) + "[basis]\nstandardize = maybe\n"), "no error");
  EXPECT_NE(ini_error(std::string(kIni) + "[output]\nformat = xml\n"), "no error");
}

TEST(Config, JsonErrors) {
  auto json_error = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      parse_json(in, "cfg.json");
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "no error";
  };
  EXPECT_NE(json_error("[1, 2]"), "no error");
  EXPECT_NE(json_error("{\"model\": "), "no error");
  EXPECT_EQ(json_error(replace(kJson, "\"volatility\": 0.2, ", "")),
            "cfg.json: [model] missing required key 'volatility'");
  EXPECT_NE(json_error(replace(kJson, "\"strike\": 100", "\"strike\": null")), "no error");
}

TEST(Config, LoadPicksParserByExtension) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto text_path = (dir / "bermudan_config_test.ini").string();
  const auto json_path = (dir / "bermudan_config_test.json").string();
  std::ofstream(text_path) << kIni;
  std::ofstream(json_path) << kJson;
  EXPECT_EQ(load_config(text_path).hash(), load_config(json_path).hash());
  std::remove(text_path.c_str());
  std::remove(json_path.c_str());
  EXPECT_THROW(load_config((dir / "bermudan_no_such_config.ini").string()), ValidationError);
}

TEST(Config, ReportFormatNames) {
  for (auto f : {ReportFormat::table, ReportFormat::csv, ReportFormat::records})
    EXPECT_EQ(parse_report_format(to_string(f)), f);
  EXPECT_THROW(parse_report_format("xml"), ValidationError);
}
