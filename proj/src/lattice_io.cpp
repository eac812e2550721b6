#include "bermudan/lattice_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "bermudan/error.hpp"

namespace bermudan::lattice {
namespace {

struct RawNode {
  bool present = false;
  Node node;
  std::optional<double> martingale;
};

}  // namespace

LatticeFile read_lattice(std::istream& in, const std::string& source) {
  auto fail = [&](std::size_t line, const std::string& message) -> ValidationError {
    return ValidationError(source + ":" + std::to_string(line) + ": " + message);
  };

  std::optional<std::size_t> horizon;
  std::vector<std::vector<RawNode>> raw;
  bool header_seen = false;
  std::optional<bool> with_martingale;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream line(text);
    std::string keyword;
    if (!(line >> keyword)) continue;

    if (keyword == "lattice") {
      std::string version;
      if (!(line >> version) || version != "v1") throw fail(line_no, "unsupported lattice version");
      header_seen = true;
    } else if (keyword == "horizon") {
      if (!header_seen) throw fail(line_no, "missing 'lattice v1' header");
      std::size_t value = 0;
      if (!(line >> value)) throw fail(line_no, "horizon: expected a nonnegative integer");
      horizon = value;
      raw.assign(value + 1, {});
    } else if (keyword == "node") {
      if (!horizon) throw fail(line_no, "node before horizon");
      std::size_t t = 0, index = 0;
      std::string parent_text;
      double probability = 0.0, payoff = 0.0;
      if (!(line >> t >> index >> parent_text >> probability >> payoff))
        throw fail(line_no, "node: expected <time> <index> <parent|-> <probability> <payoff>");
      if (t > *horizon) throw fail(line_no, "node time beyond horizon");
      double m = 0.0;
      const bool has_m = static_cast<bool>(line >> m);
      if (with_martingale && *with_martingale != has_m)
        throw fail(line_no, "martingale column must be given for all nodes or none");
      with_martingale = has_m;
      std::string extra;
      if (line >> extra) throw fail(line_no, "unexpected trailing token '" + extra + "'");

      RawNode node;
      node.present = true;
      node.node.probability = probability;
      node.node.payoff = payoff;
      if (has_m) node.martingale = m;
      if (t == 0) {
        if (parent_text != "-") throw fail(line_no, "time-0 node must have parent '-'");
      } else {
        try {
          std::size_t used = 0;
          node.node.parent = std::stoul(parent_text, &used);
          if (used != parent_text.size()) throw std::invalid_argument("parent");
        } catch (const std::exception&) {
          throw fail(line_no, "node: bad parent index '" + parent_text + "'");
        }
      }
      if (raw[t].size() <= index) raw[t].resize(index + 1);
      if (raw[t][index].present) throw fail(line_no, "duplicate node");
      raw[t][index] = node;
    } else {
      throw fail(line_no, "unknown keyword '" + keyword + "'");
    }
  }
  if (!horizon) throw fail(line_no, "missing horizon");

  std::vector<std::vector<Node>> layers(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    for (std::size_t n = 0; n < raw[t].size(); ++n) {
      if (!raw[t][n].present)
        throw fail(line_no, "missing node (" + std::to_string(t) + ", " + std::to_string(n) + ")");
      layers[t].push_back(raw[t][n].node);
    }
  }
  LatticeModel lattice(std::move(layers));
  std::optional<MartingaleField> martingale;
  if (with_martingale.value_or(false)) {
    ValueField values(lattice);
    for (std::size_t t = 0; t < raw.size(); ++t)
      for (std::size_t n = 0; n < raw[t].size(); ++n) values(t, n) = *raw[t][n].martingale;
    martingale.emplace(lattice, std::move(values));
  }
  return {std::move(lattice), std::move(martingale)};
}

LatticeFile read_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lattice file '" + path + "'");
  return read_lattice(in, path);
}

void write_lattice(std::ostream& out, const LatticeModel& lattice, const MartingaleField* martingale) {
  out << "lattice v1\n";
  out << "horizon " << lattice.horizon() << '\n';
  out << std::setprecision(17);
  for (std::size_t t = 0; t <= lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      const Node& node = lattice.node(t, n);
      out << "node " << t << ' ' << n << ' ';
      if (t == 0)
        out << '-';
      else
        out << node.parent;
      out << ' ' << node.probability << ' ' << node.payoff;
      if (martingale) out << ' ' << (*martingale)(t, n);
      out << '\n';
    }
  }
}

}  // namespace bermudan::lattice
