#include "bermudan/coefficients_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bermudan/error.hpp"
#include "bermudan/hash.hpp"

namespace bermudan {

using nlohmann::json;

void write_coefficients(std::ostream& out, const DualCoefficients& coeffs,
                        const std::string& basis_description) {
  json doc;
  doc["format"] = "bermudan-dual-coefficients";
  doc["version"] = kCoefficientsFormatVersion;
  doc["basis_hash"] = hex64(coeffs.basis_hash);
  doc["basis"] = basis_description;
  doc["training"] = {{"paths", coeffs.train_paths},
                     {"seed", coeffs.seed},
                     {"stream_id", coeffs.stream_id},
                     {"ridge", coeffs.ridge}};
  json dates = json::array();
  for (std::size_t i = 0; i < coeffs.dates.size(); ++i) {
    const auto& d = coeffs.dates[i];
    dates.push_back({{"date", i}, {"beta", d.beta}, {"gamma", d.gamma}, {"rss", d.rss}, {"rank", d.rank}});
  }
  doc["dates"] = std::move(dates);
  out << doc.dump(1) << '\n';
}

void write_coefficients_file(const std::string& path, const DualCoefficients& coeffs,
                             const std::string& basis_description) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  write_coefficients(out, coeffs, basis_description);
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

DualCoefficients read_coefficients(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "bermudan-dual-coefficients")
      throw ValidationError(source + ": not a coefficient file");
    const int version = doc.at("version").get<int>();
    if (version != kCoefficientsFormatVersion)
      throw ValidationError(source + ": unsupported coefficient format version " + std::to_string(version));
    DualCoefficients coeffs;
    coeffs.basis_hash = std::stoull(doc.at("basis_hash").get<std::string>(), nullptr, 16);
    const json& training = doc.at("training");
    coeffs.train_paths = training.at("paths").get<std::size_t>();
    coeffs.seed = training.at("seed").get<std::uint64_t>();
    coeffs.stream_id = training.at("stream_id").get<std::uint64_t>();
    coeffs.ridge = training.at("ridge").get<double>();
    for (const json& d : doc.at("dates")) {
      if (d.at("date").get<std::size_t>() != coeffs.dates.size())
        throw ValidationError(source + ": dates must be listed in order");
      DateCoefficients c;
      c.beta = d.at("beta").get<std::vector<double>>();
      c.gamma = d.at("gamma").get<std::vector<double>>();
      c.rss = d.at("rss").get<double>();
      c.rank = d.at("rank").get<std::size_t>();
      coeffs.dates.push_back(std::move(c));
    }
    return coeffs;
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ValidationError*>(&e)) throw;
    throw ValidationError(source + ": " + e.what());
  }
}

DualCoefficients read_coefficients_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_coefficients(in, path);
}

}  // namespace bermudan
