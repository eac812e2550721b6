#include "bermudan/cli/report.hpp"

#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bermudan/hash.hpp"

namespace bermudan::cli {
namespace {

std::string num(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

void write_table(std::ostream& out, const std::vector<CellReport>& cells, const ReportOptions& options) {
  out << "bermudan " << kLibraryVersion << "\n";
  for (const CellReport& c : cells) {
    out << "\n== " << c.label << "  config " << hex64(c.config.hash()) << "\n";
    const auto& m = c.config.model;
    out << "   " << to_string(m.payoff) << " D=" << m.dimension << " x0=" << num(m.spot.front(), 2)
        << " K=" << num(m.strike, 2) << " r=" << num(m.rate, 4) << " div=" << num(m.dividend, 4)
        << " vol=" << num(m.volatility, 4) << " T=" << num(m.maturity, 4) << " J=" << m.exercise_dates
        << " L=" << c.config.grid().substeps() << "\n";
    out << "   paths train=" << c.config.sampling.train_paths << " lower=" << c.config.sampling.lower_paths
        << " upper=" << c.config.sampling.upper_paths << " seed=" << c.config.sampling.seed << "\n";
    if (c.error) {
      out << "   ERROR " << *c.error << "\n";
      continue;
    }
    if (c.lower)
      out << "   lower " << pad(num(c.lower->estimate), 12) << "  (SE " << num(c.lower->standard_error) << ")\n";
    if (c.upper)
      out << "   upper " << pad(num(c.upper->estimate), 12) << "  (SE " << num(c.upper->standard_error) << ")\n";
    if (c.reference) {
      const auto& r = *c.reference;
      out << "   reference lower " << num(r.lower, 4) << " (" << num(r.lower_se, 4) << ")  upper "
          << num(r.upper, 4) << " (" << num(r.upper_se, 4) << ")  interval [" << num(r.interval_low, 3)
          << ", " << num(r.interval_high, 3) << "]\n";
    }
    out << "   theta_0 mean " << num(c.diagnostics.theta0_mean) << "  var " << num(c.diagnostics.theta0_variance)
        << "\n";
    out << "   date  var_before   var_after   var_theta     xi_mean       xi_se  rank\n";
    for (const auto& d : c.diagnostics.dates)
      out << "   " << pad(std::to_string(d.date), 4) << pad(num(d.var_before), 12) << pad(num(d.var_after), 12)
          << pad(num(d.var_theta), 12) << pad(num(d.xi_mean), 12) << pad(num(d.xi_se), 12)
          << pad(std::to_string(d.rank), 6) << (d.xi_mean_zero ? "" : "  !") << "\n";
    if (c.diagnostics.suggested_sample_size)
      out << "   suggested sample size " << *c.diagnostics.suggested_sample_size << "\n";
    for (const auto& w : c.diagnostics.warnings) out << "   warning: " << w << "\n";
    if (!options.deterministic) {
      const auto& t = c.timings;
      out << "   seconds simulate " << num(t.simulate, 2) << "  train " << num(t.train, 2) << "  lower "
          << num(t.lower, 2) << "  upper " << num(t.upper, 2) << "\n";
    }
  }
  if (cells.size() > 1) {
    out << "\n" << pad("cell", 18) << pad("lower", 12) << pad("(SE)", 10) << pad("upper", 12) << pad("(SE)", 10)
        << pad("ref lower", 12) << pad("ref upper", 12) << pad("interval", 20) << "\n";
    for (const CellReport& c : cells) {
      out << pad(c.label, 18);
      if (!c.ok()) {
        out << "  failed: " << c.error.value_or("incomplete") << "\n";
        continue;
      }
      out << pad(num(c.lower->estimate, 4), 12) << pad(num(c.lower->standard_error, 4), 10)
          << pad(num(c.upper->estimate, 4), 12) << pad(num(c.upper->standard_error, 4), 10);
      if (c.reference)
        out << pad(num(c.reference->lower, 4), 12) << pad(num(c.reference->upper, 4), 12)
            << pad("[" + num(c.reference->interval_low, 3) + ", " + num(c.reference->interval_high, 3) + "]", 20);
      out << "\n";
    }
  }
}

void write_csv(std::ostream& out, const std::vector<CellReport>& cells, const ReportOptions& options) {
  out << "cell,config_hash,payoff,dimension,spot,exercise_dates,substeps,train_paths,lower_paths,upper_paths,seed,"
         "lower,lower_se,upper,upper_se,theta0_mean,theta0_variance,ref_lower,ref_lower_se,ref_upper,ref_upper_se,"
         "ref_interval_low,ref_interval_high,warnings,error";
  if (!options.deterministic) out << ",seconds_simulate,seconds_train,seconds_lower,seconds_upper";
  out << "\n";
  for (const CellReport& c : cells) {
    const auto& m = c.config.model;
    const auto& s = c.config.sampling;
    out << '"' << c.label << '"' << ',' << hex64(c.config.hash()) << ',' << to_string(m.payoff) << ','
        << m.dimension << ',' << exact(m.spot.front()) << ',' << m.exercise_dates << ','
        << c.config.grid().substeps() << ',' << s.train_paths << ',' << s.lower_paths << ',' << s.upper_paths << ','
        << s.seed << ',';
    auto opt = [&](const std::optional<BoundEstimate>& b) {
      if (b) out << exact(b->estimate) << ',' << exact(b->standard_error) << ',';
      else out << ",,";
    };
    opt(c.lower);
    opt(c.upper);
    out << exact(c.diagnostics.theta0_mean) << ',' << exact(c.diagnostics.theta0_variance) << ',';
    if (c.reference) {
      const auto& r = *c.reference;
      out << exact(r.lower) << ',' << exact(r.lower_se) << ',' << exact(r.upper) << ',' << exact(r.upper_se) << ','
          << exact(r.interval_low) << ',' << exact(r.interval_high) << ',';
    } else {
      out << ",,,,,,";
    }
    out << c.diagnostics.warnings.size() << ',' << '"' << c.error.value_or("") << '"';
    if (!options.deterministic)
      out << ',' << exact(c.timings.simulate) << ',' << exact(c.timings.train) << ',' << exact(c.timings.lower)
          << ',' << exact(c.timings.upper);
    out << "\n";
  }
}

nlohmann::json bound_json(const BoundEstimate& b) {
  return {{"kind", std::string(to_string(b.kind))}, {"estimate", b.estimate}, {"standard_error", b.standard_error},
          {"samples", b.samples},  {"seed", b.seed},  {"stream_id", b.stream_id}};
}

void write_records(std::ostream& out, const std::vector<CellReport>& cells, const ReportOptions& options) {
  for (const CellReport& c : cells) {
    nlohmann::json rec;
    rec["version"] = std::string(kLibraryVersion);
    rec["cell"] = c.label;
    rec["config_hash"] = hex64(c.config.hash());
    rec["config"] = c.config.canonical();
    rec["lower"] = c.lower ? bound_json(*c.lower) : nlohmann::json();
    rec["upper"] = c.upper ? bound_json(*c.upper) : nlohmann::json();
    nlohmann::json dates = nlohmann::json::array();
    for (const auto& d : c.diagnostics.dates)
      dates.push_back({{"date", d.date},
                       {"var_before", d.var_before},
                       {"var_after", d.var_after},
                       {"var_theta", d.var_theta},
                       {"xi_mean", d.xi_mean},
                       {"xi_se", d.xi_se},
                       {"xi_mean_zero", d.xi_mean_zero},
                       {"rank", d.rank}});
    rec["diagnostics"] = {{"dates", dates},
                          {"theta0_mean", c.diagnostics.theta0_mean},
                          {"theta0_variance", c.diagnostics.theta0_variance},
                          {"warnings", c.diagnostics.warnings}};
    if (c.diagnostics.suggested_sample_size)
      rec["diagnostics"]["suggested_sample_size"] = *c.diagnostics.suggested_sample_size;
    if (c.reference) {
      const auto& r = *c.reference;
      rec["reference"] = {{"lower", r.lower},
                          {"lower_se", r.lower_se},
                          {"upper", r.upper},
                          {"upper_se", r.upper_se},
                          {"interval", {r.interval_low, r.interval_high}}};
    }
    rec["error"] = c.error ? nlohmann::json(*c.error) : nlohmann::json();
    if (!options.deterministic)
      rec["seconds"] = {{"simulate", c.timings.simulate},
                        {"train", c.timings.train},
                        {"lower", c.timings.lower},
                        {"upper", c.timings.upper}};
    out << rec.dump() << "\n";
  }
}

}  // namespace

void write_report(std::ostream& out, const std::vector<CellReport>& cells, const ReportOptions& options) {
  switch (options.format) {
    case ReportFormat::table:
      write_table(out, cells, options);
      break;
    case ReportFormat::csv:
      write_csv(out, cells, options);
      break;
    case ReportFormat::records:
      write_records(out, cells, options);
      break;
  }
}

}  // namespace bermudan::cli
