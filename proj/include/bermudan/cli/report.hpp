#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bermudan/cli/config.hpp"
#include "bermudan/dual_engine.hpp"

namespace bermudan::cli {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

// Reference bounds and an independent price interval for a benchmark cell.
struct ReferenceValues {
  double lower = 0.0;
  double lower_se = 0.0;
  double upper = 0.0;
  double upper_se = 0.0;
  double interval_low = 0.0;
  double interval_high = 0.0;
};

struct PhaseTimings {
  double simulate = 0.0;
  double train = 0.0;
  double upper = 0.0;
  double lower = 0.0;
};

struct CellReport {
  std::string label;  // "run" for a single pricing, "J=3,x0=100" in a sweep
  RunConfig config;
  std::optional<BoundEstimate> lower;
  std::optional<BoundEstimate> upper;
  VarianceDiagnostics diagnostics;
  PhaseTimings timings;
  std::optional<ReferenceValues> reference;
  std::optional<std::string> error;  // set when the cell aborted

  bool ok() const { return !error && lower && upper; }
};

struct ReportOptions {
  ReportFormat format = ReportFormat::table;
  // Omit wall-clock timings so that repeated runs are byte-identical.
  bool deterministic = false;
};

void write_report(std::ostream& out, const std::vector<CellReport>& cells, const ReportOptions& options);

}  // namespace bermudan::cli
