#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bermudan/basis.hpp"
#include "bermudan/gbm.hpp"
#include "bermudan/least_squares.hpp"

namespace bermudan::cli {

enum class ReportFormat { table, csv, records };

std::string_view to_string(ReportFormat format);
ReportFormat parse_report_format(std::string_view name);

struct ModelConfig {
  PayoffKind payoff = PayoffKind::basket_put;
  std::size_t dimension = 0;
  double rate = 0.0;
  double dividend = 0.0;
  double volatility = 0.0;
  double strike = 0.0;
  std::vector<double> spot;  // length dimension
  double maturity = 0.0;
  std::size_t exercise_dates = 0;
  double time_step = 0.01;
  std::optional<std::size_t> substeps;  // overrides time_step
};

struct BasisConfig {
  BasisOptions options;
  double ridge = 0.0;
  bool standardize = true;
};

struct SamplingConfig {
  std::size_t train_paths = 1000;
  std::size_t lower_paths = 300000;
  std::size_t upper_paths = 100000;
  std::uint64_t seed = 20240901;
  std::size_t block_size = 1000;
};

struct OutputConfig {
  ReportFormat format = ReportFormat::table;
  std::string path;  // empty: standard output
};

struct RunConfig {
  ModelConfig model;
  BasisConfig basis;
  SamplingConfig sampling;
  OutputConfig output;

  // Checks every field; throws ValidationError.
  void validate() const;

  GbmModel gbm() const;
  TimeGrid grid() const;
  BasisSet basis_set() const;
  LeastSquaresOptions least_squares() const;

  // Sorted "section.key=value" lines over every setting except the output block.
  std::string canonical() const;
  std::uint64_t hash() const;
};

// Sectioned key = value text:
//   [model]
//   payoff = basket_put
//   spot = 100            # scalar, or a comma-separated list
// Comments start with '#' or ';'. Errors name the source and line.
RunConfig parse_ini(std::istream& in, const std::string& source = "<config>");
// The same settings as a JSON object of sections.
RunConfig parse_json(std::istream& in, const std::string& source = "<config>");
// Picks the parser by extension (.json, anything else is the text format).
RunConfig load_config(const std::string& path);

}  // namespace bermudan::cli
