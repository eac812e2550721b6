#include "bermudan/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bermudan/error.hpp"
#include "bermudan/hash.hpp"

namespace bermudan::cli {
namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;  // 0 when the source has no line information
};

using Section = std::map<std::string, Entry>;
using RawConfig = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model",
       {"payoff", "dimension", "rate", "dividend", "volatility", "strike", "spot", "maturity",
        "exercise_dates", "time_step", "substeps"}},
      {"basis",
       {"degree", "cross_terms", "ridge", "standardize", "psi_state", "psi_european", "phi_constant",
        "phi_deltas", "quadrature_relative_tolerance", "quadrature_absolute_tolerance"}},
      {"sampling", {"train_paths", "lower_paths", "upper_paths", "seed", "block_size"}},
      {"output", {"format", "path"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string where(const std::string& source, std::size_t line) {
  return line ? source + ":" + std::to_string(line) : source;
}

void check_known(const RawConfig& raw, const std::string& source) {
  for (const auto& [section, entries] : raw) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ValidationError(source + ": unknown section [" + section + "]");
    for (const auto& [key, entry] : entries)
      if (!it->second.count(key))
        throw ValidationError(where(source, entry.line) + ": unknown key '" + key + "' in [" + section + "]");
  }
}

class Reader {
 public:
  Reader(const RawConfig& raw, std::string source) : raw_(raw), source_(std::move(source)) {}

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = raw_.find(section);
    if (s == raw_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ValidationError(source_ + ": [" + section + "] missing required key '" + key + "'");
    return *e;
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const Entry& e,
                         const std::string& what) const {
    throw ValidationError(where(source_, e.line) + ": [" + section + "] " + key + ": " + what);
  }

  double to_double(const std::string& section, const std::string& key, const Entry& e,
                   std::string_view text) const {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
      fail(section, key, e, "expected a number, got '" + t + "'");
    return v;
  }

  double number(const std::string& section, const std::string& key, std::optional<double> fallback = {}) const {
    const Entry* e = fallback ? find(section, key) : &require(section, key);
    if (!e) return *fallback;
    return to_double(section, key, *e, e->value);
  }

  std::uint64_t count(const std::string& section, const std::string& key,
                      std::optional<std::uint64_t> fallback = {}) const {
    const Entry* e = fallback ? find(section, key) : &require(section, key);
    if (!e) return *fallback;
    const std::string t = trim(e->value);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
      fail(section, key, *e, "expected a nonnegative integer, got '" + t + "'");
    return v;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::string t = trim(e->value);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
    if (t == "false" || t == "no" || t == "off" || t == "0") return false;
    fail(section, key, *e, "expected true or false, got '" + t + "'");
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? trim(e->value) : fallback;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    std::vector<double> out;
    std::string_view rest = e.value;
    while (true) {
      const auto comma = rest.find(',');
      out.push_back(to_double(section, key, e, rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  template <class F>
  auto guarded(const std::string& section, const std::string& key, F f) const {
    const Entry& e = require(section, key);
    try {
      return f(trim(e.value));
    } catch (const ValidationError& err) {
      fail(section, key, e, err.what());
    }
  }

  const std::string& source() const { return source_; }

 private:
  const RawConfig& raw_;
  std::string source_;
};

RunConfig build(const RawConfig& raw, const std::string& source) {
  check_known(raw, source);
  if (!raw.count("model")) throw ValidationError(source + ": missing section [model]");
  const Reader r(raw, source);
  RunConfig c;

  auto& m = c.model;
  m.payoff = r.guarded("model", "payoff", [](const std::string& v) { return parse_payoff_kind(v); });
  m.dimension = r.count("model", "dimension");
  m.rate = r.number("model", "rate");
  m.dividend = r.number("model", "dividend", 0.0);
  m.volatility = r.number("model", "volatility");
  m.strike = r.number("model", "strike");
  m.spot = r.numbers("model", "spot");
  if (m.spot.size() == 1 && m.dimension > 1) m.spot.assign(m.dimension, m.spot[0]);
  if (m.spot.size() != m.dimension) {
    r.fail("model", "spot", r.require("model", "spot"),
           "has " + std::to_string(m.spot.size()) + " values but dimension is " +
               std::to_string(m.dimension));
  }
  m.maturity = r.number("model", "maturity");
  m.exercise_dates = r.count("model", "exercise_dates");
  m.time_step = r.number("model", "time_step", 0.01);
  if (r.find("model", "substeps")) m.substeps = r.count("model", "substeps");

  auto& b = c.basis;
  b.options.degree = r.count("basis", "degree", 3);
  b.options.cross_terms = r.flag("basis", "cross_terms", false);
  b.options.psi_state = r.flag("basis", "psi_state", true);
  b.options.psi_european = r.flag("basis", "psi_european", true);
  b.options.phi_constant = r.flag("basis", "phi_constant", true);
  b.options.phi_deltas = r.flag("basis", "phi_deltas", true);
  b.options.quadrature.relative_tolerance =
      r.number("basis", "quadrature_relative_tolerance", b.options.quadrature.relative_tolerance);
  b.options.quadrature.absolute_tolerance =
      r.number("basis", "quadrature_absolute_tolerance", b.options.quadrature.absolute_tolerance);
  b.ridge = r.number("basis", "ridge", 0.0);
  b.standardize = r.flag("basis", "standardize", true);

  auto& s = c.sampling;
  s.train_paths = r.count("sampling", "train_paths", s.train_paths);
  s.lower_paths = r.count("sampling", "lower_paths", s.lower_paths);
  s.upper_paths = r.count("sampling", "upper_paths", s.upper_paths);
  s.seed = r.count("sampling", "seed", s.seed);
  s.block_size = r.count("sampling", "block_size", s.block_size);

  if (const Entry* e = r.find("output", "format")) {
    try {
      c.output.format = parse_report_format(trim(e->value));
    } catch (const ValidationError& err) {
      r.fail("output", "format", *e, err.what());
    }
  }
  c.output.path = r.text("output", "path", "");

  try {
    c.validate();
  } catch (const ValidationError& err) {
    throw ValidationError(source + ": " + err.what());
  }
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::table:
      return "table";
    case ReportFormat::csv:
      return "csv";
    case ReportFormat::records:
      return "records";
  }
  return "table";
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "table") return ReportFormat::table;
  if (name == "csv") return ReportFormat::csv;
  if (name == "records") return ReportFormat::records;
  throw ValidationError("unknown report format '" + std::string(name) + "' (table, csv, records)");
}

void RunConfig::validate() const {
  if (model.dimension == 0) throw ValidationError("[model] dimension must be at least 1");
  if (model.spot.size() != model.dimension)
    throw ValidationError("[model] spot count does not match dimension");
  if (!(model.time_step > 0.0)) throw ValidationError("[model] time_step must be positive");
  if (model.substeps && *model.substeps == 0) throw ValidationError("[model] substeps must be positive");
  gbm().validate();
  (void)grid();
  basis.options.validate();
  if (!(basis.ridge >= 0.0)) throw ValidationError("[basis] ridge must be nonnegative");
  if (sampling.train_paths < 2 || sampling.lower_paths < 2 || sampling.upper_paths < 2)
    throw ValidationError("[sampling] path counts must be at least 2");
  if (sampling.block_size == 0) throw ValidationError("[sampling] block_size must be positive");
}

GbmModel RunConfig::gbm() const {
  GbmModel g;
  g.payoff = model.payoff;
  g.rate = model.rate;
  g.dividend = model.dividend;
  g.volatility = model.volatility;
  g.strike = model.strike;
  g.spot = model.spot;
  return g;
}

TimeGrid RunConfig::grid() const {
  if (model.substeps) return TimeGrid(model.maturity, model.exercise_dates, *model.substeps);
  return TimeGrid::with_max_step(model.maturity, model.exercise_dates, model.time_step);
}

BasisSet RunConfig::basis_set() const { return BasisSet(gbm(), grid(), basis.options); }

LeastSquaresOptions RunConfig::least_squares() const {
  LeastSquaresOptions o;
  o.ridge = basis.ridge;
  o.standardize = basis.standardize;
  return o;
}

std::string RunConfig::canonical() const {
  std::vector<std::string> lines;
  auto add = [&](const std::string& key, const std::string& value) { lines.push_back(key + "=" + value); };
  add("model.payoff", std::string(to_string(model.payoff)));
  add("model.dimension", std::to_string(model.dimension));
  add("model.rate", fmt(model.rate));
  add("model.dividend", fmt(model.dividend));
  add("model.volatility", fmt(model.volatility));
  add("model.strike", fmt(model.strike));
  std::string spots;
  for (std::size_t d = 0; d < model.spot.size(); ++d) spots += (d ? "," : "") + fmt(model.spot[d]);
  add("model.spot", spots);
  add("model.maturity", fmt(model.maturity));
  add("model.exercise_dates", std::to_string(model.exercise_dates));
  add("model.substeps", std::to_string(grid().substeps()));
  add("basis.degree", std::to_string(basis.options.degree));
  add("basis.cross_terms", basis.options.cross_terms ? "true" : "false");
  add("basis.psi_state", basis.options.psi_state ? "true" : "false");
  add("basis.psi_european", basis.options.psi_european ? "true" : "false");
  add("basis.phi_constant", basis.options.phi_constant ? "true" : "false");
  add("basis.phi_deltas", basis.options.phi_deltas ? "true" : "false");
  add("basis.quadrature_relative_tolerance", fmt(basis.options.quadrature.relative_tolerance));
  add("basis.quadrature_absolute_tolerance", fmt(basis.options.quadrature.absolute_tolerance));
  add("basis.ridge", fmt(basis.ridge));
  add("basis.standardize", basis.standardize ? "true" : "false");
  add("sampling.train_paths", std::to_string(sampling.train_paths));
  add("sampling.lower_paths", std::to_string(sampling.lower_paths));
  add("sampling.upper_paths", std::to_string(sampling.upper_paths));
  add("sampling.seed", std::to_string(sampling.seed));
  add("sampling.block_size", std::to_string(sampling.block_size));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

RunConfig parse_ini(std::istream& in, const std::string& source) {
  RawConfig raw;
  std::string section;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    const std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    const std::string at = source + ":" + std::to_string(number);
    if (body.front() == '[') {
      if (body.back() != ']') throw ValidationError(at + ": unterminated section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!known_keys().count(section)) throw ValidationError(at + ": unknown section [" + section + "]");
      if (raw.count(section)) throw ValidationError(at + ": duplicate section [" + section + "]");
      raw[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ValidationError(at + ": expected 'key = value'");
    if (section.empty()) throw ValidationError(at + ": key outside of any section");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ValidationError(at + ": empty key");
    if (value.empty()) throw ValidationError(at + ": empty value for '" + key + "'");
    if (raw[section].count(key)) throw ValidationError(at + ": duplicate key '" + key + "'");
    raw[section][key] = {value, number};
  }
  return build(raw, source);
}

RunConfig parse_json(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError(source + ": top level must be an object of sections");
  RawConfig raw;
  for (const auto& [section, entries] : doc.items()) {
    if (!entries.is_object()) throw ValidationError(source + ": section '" + section + "' must be an object");
    for (const auto& [key, value] : entries.items()) {
      std::string text;
      if (value.is_string()) {
        text = value.get<std::string>();
      } else if (value.is_boolean()) {
        text = value.get<bool>() ? "true" : "false";
      } else if (value.is_number_integer() || value.is_number_unsigned()) {
        text = value.dump();
      } else if (value.is_number_float()) {
        text = fmt(value.get<double>());
      } else if (value.is_array()) {
        for (std::size_t k = 0; k < value.size(); ++k) {
          if (!value[k].is_number())
            throw ValidationError(source + ": [" + section + "] " + key + ": list entries must be numbers");
          text += (k ? "," : "") + fmt(value[k].get<double>());
        }
      } else {
        throw ValidationError(source + ": [" + section + "] " + key + ": unsupported value");
      }
      raw[section][key] = {text, 0};
    }
  }
  return build(raw, source);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return is_json ? parse_json(in, path) : parse_ini(in, path);
}

}  // namespace bermudan::cli
