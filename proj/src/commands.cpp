#include "bermudan/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bermudan/cli/benchmarks.hpp"
#include "bermudan/cli/config.hpp"
#include "bermudan/cli/report.hpp"
#include "bermudan/coefficients_io.hpp"
#include "bermudan/error.hpp"
#include "bermudan/lattice.hpp"
#include "bermudan/lattice_io.hpp"
#include "bermudan/lattice_verify.hpp"

namespace bermudan::cli {
namespace {

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream = nullptr;

  OutputTarget(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream = &fallback;
      return;
    }
    file.open(path);
    if (!file) throw ValidationError("cannot open '" + path + "' for writing");
    stream = &file;
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

void print_results(std::ostream& out, const std::vector<lattice::PropertyResult>& results) {
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name;
    if (!r.detail.empty()) out << "  [" << r.detail << "]";
    out << "\n";
  }
}

std::vector<lattice::PropertyResult> check_lattice_file(const lattice::LatticeFile& file, double tol,
                                                        std::ostream& out) {
  using namespace lattice;
  std::vector<PropertyResult> results;
  const LatticeModel& model = file.lattice;
  const ValueField snell = snell_envelope(model);
  out << "lattice: horizon " << model.horizon() << ", " << model.path_count() << " paths, Y*_0 = "
      << snell(0, 0) << "\n";
  const auto doob = doob_decomposition(model, snell);
  bool doob_sure = true;
  for (std::size_t i = 0; i <= model.horizon(); ++i)
    doob_sure = doob_sure && is_surely_optimal(model, snell, doob.martingale, i, tol);
  results.push_back({"lattice: Doob martingale surely optimal at every date", doob_sure, {}});
  const ValueField stopped = stopped_payoff_value(model, first_optimal_stopping(model, snell));
  results.push_back({"lattice: first optimal stopping attains Y*_0",
                     std::abs(stopped(0, 0) - snell(0, 0)) <= tol, {}});
  if (file.martingale) {
    bool dual = true;
    for (std::size_t i = 0; i <= model.horizon(); ++i) {
      const auto moments = dual_value_moments(model, *file.martingale, i);
      for (std::size_t n = 0; n < model.layer_size(i); ++n) dual = dual && moments.mean[n] >= snell(i, n) - tol;
      out << "martingale: date " << i << " surely optimal "
          << (is_surely_optimal(model, snell, *file.martingale, i, tol) ? "yes" : "no");
      if (i == 0) out << ", E theta_0 = " << moments.mean[0] << ", Var theta_0 = " << moments.variance[0];
      out << "\n";
    }
    results.push_back({"lattice: duality E_i theta_i >= Y*_i for the supplied martingale", dual, {}});
  }
  return results;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return kNumericalFailure;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DomainError*>(&e))
    return kValidationFailure;
  return kNumericalFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bermudan option bounds from regression-fitted dual martingales"};
  app.require_subcommand(1);

  std::string format_name;
  bool deterministic = false;
  std::string out_path;
  std::optional<std::uint64_t> seed;

  auto* price = app.add_subcommand("price", "Price one configuration: train, then lower and upper bounds");
  std::string config_path, coeffs_out, coeffs_in;
  price->add_option("--config", config_path, "Configuration file (.ini-style text or .json)")->required();
  price->add_option("--seed", seed, "Override the sampling seed");
  price->add_option("--out", out_path, "Report path (default: standard output)");
  price->add_option("--format", format_name, "table, csv or records");
  price->add_option("--coeffs-out", coeffs_out, "Write the trained coefficients as JSON");
  price->add_option("--coeffs-in", coeffs_in, "Use stored coefficients instead of training");
  price->add_flag("--deterministic", deterministic, "Omit timings from the report");

  auto* bench = app.add_subcommand("bench", "Run a benchmark grid");
  std::string table_name, cells_filter;
  double paths_scale = 1.0;
  bench->add_option("--table", table_name, "basket_put or max_call")->required();
  bench->add_option("--cells", cells_filter, "Filter such as \"J=3,x0=100\"");
  bench->add_option("--paths-scale", paths_scale, "Scale the lower and upper path counts");
  bench->add_option("--seed", seed, "Master seed");
  bench->add_option("--out", out_path, "Report path (default: standard output)");
  bench->add_option("--format", format_name, "table, csv or records");
  bench->add_flag("--deterministic", deterministic, "Omit timings from the report");

  auto* verify = app.add_subcommand("verify", "Run the exact lattice property suite");
  std::string fixtures, lattice_path;
  lattice::VerifyOptions verify_options;
  verify->add_option("--fixtures", fixtures,
                     "Comma-separated subset of optimal_not_sure, sure_not_hereditary, counter1, random");
  verify->add_flag("--fault-inject", verify_options.fault_inject, "Perturb the Doob martingale by 1e-3");
  verify->add_option("--lattice", lattice_path, "Also check a lattice file");
  verify->add_option("--random-lattices", verify_options.random_lattices, "Number of random lattices");
  verify->add_option("--seed", seed, "Seed for the random lattices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationFailure;
  }

  try {
    if (*price) {
      RunConfig config = load_config(config_path);
      if (seed) config.sampling.seed = *seed;
      ReportOptions report_options;
      report_options.format = format_name.empty() ? config.output.format : parse_report_format(format_name);
      report_options.deterministic = deterministic;
      PricingRequest request;
      request.config = config;
      if (!coeffs_in.empty()) request.coefficients = read_coefficients_file(coeffs_in);
      PricingResult result = run_pricing(request);
      if (!coeffs_out.empty())
        write_coefficients_file(coeffs_out, result.coefficients, config.basis_set().description());
      OutputTarget target(out_path.empty() ? config.output.path : out_path, out);
      write_report(*target.stream, {result.report}, report_options);
      return kSuccess;
    }
    if (*bench) {
      const PayoffKind table = parse_payoff_kind(table_name);
      auto cells = filter_cells(benchmark_cells(table, seed.value_or(SamplingConfig{}.seed), paths_scale),
                                cells_filter);
      if (cells.empty()) throw ValidationError("cell filter '" + cells_filter + "' matches no cell");
      const auto reports = run_benchmark(cells);
      ReportOptions report_options;
      report_options.format = format_name.empty() ? ReportFormat::table : parse_report_format(format_name);
      report_options.deterministic = deterministic;
      OutputTarget target(out_path, out);
      write_report(*target.stream, reports, report_options);
      for (const auto& r : reports)
        if (r.error) return kNumericalFailure;
      return kSuccess;
    }
    if (*verify) {
      verify_options.fixtures = split_list(fixtures);
      for (const auto& f : verify_options.fixtures)
        if (f != "optimal_not_sure" && f != "sure_not_hereditary" && f != "counter1" && f != "random")
          throw ValidationError("unknown fixture group '" + f + "'");
      if (seed) verify_options.seed = *seed;
      auto results = lattice::run_lattice_verification(verify_options);
      if (!lattice_path.empty()) {
        const auto extra = check_lattice_file(lattice::read_lattice_file(lattice_path), verify_options.tolerance, out);
        results.insert(results.end(), extra.begin(), extra.end());
      }
      print_results(out, results);
      std::size_t failed = 0;
      for (const auto& r : results) failed += !r.passed;
      out << (failed ? "FAILED " : "OK ") << results.size() - failed << "/" << results.size() << " properties\n";
      return failed ? kPropertyFailure : kSuccess;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kValidationFailure;
}

}  // namespace bermudan::cli
