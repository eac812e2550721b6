#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bermudan/cli/config.hpp"
#include "bermudan/cli/report.hpp"
#include "bermudan/dual_engine.hpp"

namespace bermudan::cli {

// Stream ids for a run: cell c trains on 4c+1, estimates the lower bound on
// 4c+2 and the upper bound on 4c+3, all under the sampling seed.
struct RunStreams {
  std::uint64_t train = 1;
  std::uint64_t lower = 2;
  std::uint64_t upper = 3;

  static RunStreams for_cell(std::size_t cell_index);
};

struct PricingRequest {
  RunConfig config;
  std::string label = "run";
  RunStreams streams;
  std::optional<DualCoefficients> coefficients;  // skip training when given
};

struct PricingResult {
  CellReport report;
  DualCoefficients coefficients;
};

// Train (unless coefficients are supplied), then estimate both bounds on
// fresh paths. Errors propagate as exceptions.
PricingResult run_pricing(const PricingRequest& request);

struct BenchCell {
  std::size_t index = 0;
  std::string label;                         // "J=3,x0=100"
  std::map<std::string, std::string> tags;  // {"J": "3", "x0": "100"}
  RunConfig config;
  std::optional<ReferenceValues> reference;
};

// The benchmark grids: basket put over J in {3, 6, 9} x x0 in {90, 100, 110};
// max call over D in {2, 5} x x0 in {90, 100, 110}. Lower and upper path
// counts are scaled by paths_scale (at least 2); training paths are not.
std::vector<BenchCell> benchmark_cells(PayoffKind table, std::uint64_t seed = 20240901,
                                       double paths_scale = 1.0);

// Keeps the cells whose tags match every "key=value" item of the
// comma-separated filter. An empty filter keeps everything.
std::vector<BenchCell> filter_cells(const std::vector<BenchCell>& cells, const std::string& filter);

// Runs each cell; a failing cell is reported with its error.
std::vector<CellReport> run_benchmark(const std::vector<BenchCell>& cells);

}  // namespace bermudan::cli
