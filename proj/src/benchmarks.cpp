#include "bermudan/cli/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "bermudan/error.hpp"

namespace bermudan::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Reference lower / upper bounds with standard errors, and an independent
// price interval, for each benchmark cell.
struct ReferenceRow {
  std::size_t key;  // J for the basket put, D for the max call
  double x0;
  ReferenceValues values;
};

const std::vector<ReferenceRow> kBasketPut = {
    {3, 90, {10.000, 0.000, 10.000, 0.000, 10.000, 10.004}},
    {3, 100, {2.164, 0.007, 2.172, 0.001, 2.154, 2.164}},
    {3, 110, {0.539, 0.004, 0.551, 0.001, 0.535, 0.540}},
    {6, 90, {10.000, 0.000, 10.000, 0.000, 10.000, 10.000}},
    {6, 100, {2.407, 0.006, 2.432, 0.001, 2.359, 2.412}},
    {6, 110, {0.573, 0.003, 0.609, 0.001, 0.569, 0.580}},
    {9, 90, {10.000, 0.0000, 10.008, 0.0003, 10.000, 10.005}},
    {9, 100, {2.475, 0.0063, 2.522, 0.0013, 2.385, 2.502}},
    {9, 110, {0.5915, 0.0034, 0.6353, 0.0009, 0.577, 0.600}},
};

const std::vector<ReferenceRow> kMaxCall = {
    {2, 90, {8.0556, 0.0219, 8.15655, 0.0034, 8.053, 8.082}},
    {2, 100, {13.8850, 0.0276, 14.0293, 0.0044, 13.892, 13.934}},
    {2, 110, {21.3671, 0.0319, 21.5319, 0.0048, 21.316, 21.359}},
    {5, 90, {16.5973, 0.0296, 16.7963, 0.0058, 16.602, 16.655}},
    {5, 100, {26.1325, 0.0356, 26.3803, 0.0072, 26.109, 26.292}},
    {5, 110, {36.7348, 0.0403, 37.0856, 0.0082, 36.704, 36.832}},
};

std::size_t scaled(std::size_t n, double scale) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(static_cast<double>(n) * scale)));
}

}  // namespace

RunStreams RunStreams::for_cell(std::size_t cell_index) {
  const std::uint64_t base = 4 * static_cast<std::uint64_t>(cell_index);
  return {base + 1, base + 2, base + 3};
}

PricingResult run_pricing(const PricingRequest& request) {
  const RunConfig& config = request.config;
  config.validate();
  const BasisSet basis = config.basis_set();
  PricingResult result;
  CellReport& report = result.report;
  report.label = request.label;
  report.config = config;

  EngineOptions engine;
  engine.least_squares = config.least_squares();

  if (request.coefficients) {
    result.coefficients = *request.coefficients;
    if (result.coefficients.basis_hash != basis.hash())
      throw ValidationError("supplied coefficients were trained for a different model or basis");
  } else {
    auto start = Clock::now();
    const PathBatch batch = simulate_gbm(basis.model(), basis.grid(), config.sampling.train_paths,
                                         RngStream(config.sampling.seed, request.streams.train));
    report.timings.simulate = seconds_since(start);
    start = Clock::now();
    TrainingResult trained = backward_pass(batch, basis, engine);
    report.timings.train = seconds_since(start);
    result.coefficients = std::move(trained.coefficients);
    report.diagnostics = std::move(trained.diagnostics);
  }

  const auto& s = config.sampling;
  report.lower = lower_bound(result.coefficients, basis,
                             FreshSample{s.lower_paths, s.seed, request.streams.lower, s.block_size});
  report.timings.lower = report.lower->seconds;
  report.upper = upper_bound(result.coefficients, basis,
                             FreshSample{s.upper_paths, s.seed, request.streams.upper, s.block_size});
  report.timings.upper = report.upper->seconds;
  return result;
}

std::vector<BenchCell> benchmark_cells(PayoffKind table, std::uint64_t seed, double paths_scale) {
  if (!(paths_scale > 0.0) || !std::isfinite(paths_scale))
    throw ValidationError("paths scale must be positive");
  std::vector<BenchCell> cells;
  const bool put = table == PayoffKind::basket_put;
  for (const ReferenceRow& row : put ? kBasketPut : kMaxCall) {
    RunConfig c;
    auto& m = c.model;
    m.payoff = table;
    m.dimension = put ? 5 : row.key;
    m.rate = 0.05;
    m.dividend = put ? 0.0 : 0.1;
    m.volatility = 0.2;
    m.strike = 100.0;
    m.spot.assign(m.dimension, row.x0);
    m.maturity = 3.0;
    m.exercise_dates = put ? row.key : 9;
    m.time_step = 0.01;
    c.sampling.seed = seed;
    c.sampling.lower_paths = scaled(c.sampling.lower_paths, paths_scale);
    c.sampling.upper_paths = scaled(c.sampling.upper_paths, paths_scale);

    BenchCell cell;
    cell.index = cells.size();
    const std::string key = put ? "J" : "D";
    std::ostringstream x0;
    x0 << row.x0;
    cell.tags = {{key, std::to_string(row.key)}, {"x0", x0.str()}};
    cell.label = key + "=" + std::to_string(row.key) + ",x0=" + x0.str();
    cell.config = std::move(c);
    cell.reference = row.values;
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<BenchCell> filter_cells(const std::vector<BenchCell>& cells, const std::string& filter) {
  std::vector<std::pair<std::string, std::string>> wanted;
  std::stringstream in(filter);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("cell filter item '" + item + "' is not key=value");
    auto strip = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    wanted.emplace_back(strip(item.substr(0, eq)), strip(item.substr(eq + 1)));
  }
  std::vector<BenchCell> out;
  for (const BenchCell& c : cells) {
    bool keep = true;
    for (const auto& [k, v] : wanted) {
      const auto it = c.tags.find(k);
      if (it == c.tags.end()) throw ValidationError("cell filter key '" + k + "' does not apply to this table");
      keep = keep && it->second == v;
    }
    if (keep) out.push_back(c);
  }
  return out;
}

std::vector<CellReport> run_benchmark(const std::vector<BenchCell>& cells) {
  std::vector<CellReport> reports;
  for (const BenchCell& cell : cells) {
    PricingRequest request;
    request.config = cell.config;
    request.label = cell.label;
    request.streams = RunStreams::for_cell(cell.index);
    try {
      CellReport report = run_pricing(request).report;
      report.reference = cell.reference;
      reports.push_back(std::move(report));
    } catch (const std::exception& e) {
      CellReport failed;
      failed.label = cell.label;
      failed.config = cell.config;
      failed.reference = cell.reference;
      failed.error = e.what();
      reports.push_back(std::move(failed));
    }
  }
  return reports;
}

}  // namespace bermudan::cli
