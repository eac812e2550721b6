#include "bermudan/lattice_fixtures.hpp"

#include <charconv>
#include <random>

#include "bermudan/error.hpp"

namespace bermudan::lattice {
namespace {

Fixture optimal_not_sure() {
  std::vector<std::vector<Node>> layers{{{0, 1.0, 0.0}}, {{0, 0.5, 2.0}, {0, 0.5, 2.0}}};
  LatticeModel lattice(std::move(layers));
  ValueField m(lattice);
  m(1, 0) = 1.0;
  m(1, 1) = -1.0;
  MartingaleField martingale(lattice, std::move(m));
  return {"optimal_not_sure", std::move(lattice), std::move(martingale)};
}

Fixture sure_not_hereditary() {
  std::vector<std::vector<Node>> layers{
      {{0, 1.0, 4.0}},
      {{0, 0.5, 0.0}, {0, 0.5, 0.0}},
      {{0, 0.5, 2.0}, {0, 0.5, 2.0}, {1, 0.5, 2.0}, {1, 0.5, 2.0}}};
  LatticeModel lattice(std::move(layers));
  ValueField m(lattice);
  m(1, 0) = 1.0;
  m(1, 1) = -1.0;
  m(2, 0) = 2.0;
  m(2, 1) = 0.0;
  m(2, 2) = 0.0;
  m(2, 3) = -2.0;
  MartingaleField martingale(lattice, std::move(m));
  return {"sure_not_hereditary", std::move(lattice), std::move(martingale)};
}

Fixture counter1(std::size_t n) {
  if (n < 2) throw ValidationError("counter1(n) requires n >= 2");
  const double nd = static_cast<double>(n);
  std::vector<std::vector<Node>> layers{{{0, 1.0, 0.0}},
                                        {{0, (nd - 1.0) / nd, 0.0}, {0, 1.0 / nd, 0.0}}};
  LatticeModel lattice(std::move(layers));
  ValueField m(lattice);
  m(1, 0) = -1.0;        // xi = 1
  m(1, 1) = nd - 1.0;    // xi = 1 - n
  MartingaleField martingale(lattice, std::move(m), 1e-12);
  return {"counter1(" + std::to_string(n) + ")", std::move(lattice), std::move(martingale)};
}

}  // namespace

Fixture build_fixture(std::string_view name) {
  if (name == "optimal_not_sure") return optimal_not_sure();
  if (name == "sure_not_hereditary") return sure_not_hereditary();
  if (name.starts_with("counter1(") && name.ends_with(")")) {
    const std::string_view digits = name.substr(9, name.size() - 10);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return counter1(n);
  }
  throw ValidationError("unknown lattice fixture '" + std::string(name) + "'");
}

std::vector<std::string> fixture_names() {
  return {"optimal_not_sure", "sure_not_hereditary", "counter1(4)"};
}

LatticeModel random_lattice(std::size_t horizon, std::uint64_t seed,
                            const RandomLatticeOptions& options) {
  if (options.branching < 1 || options.branching > 8)
    throw ValidationError("random lattice: branching must lie in 1..8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> payoff(options.min_payoff, options.max_payoff);

  // Split 8 eighths among the children, each receiving at least one.
  auto dyadic_split = [&](std::size_t k) {
    std::vector<int> eighths(k, 1);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (std::size_t r = k; r < 8; ++r) ++eighths[pick(rng)];
    std::vector<double> probs(k);
    for (std::size_t i = 0; i < k; ++i) probs[i] = eighths[i] / 8.0;
    return probs;
  };

  std::vector<std::vector<Node>> layers(horizon + 1);
  layers[0].push_back({0, 1.0, payoff(rng)});
  for (std::size_t t = 1; t <= horizon; ++t) {
    for (std::size_t parent = 0; parent < layers[t - 1].size(); ++parent) {
      for (double p : dyadic_split(options.branching)) layers[t].push_back({parent, p, payoff(rng)});
    }
  }
  return LatticeModel(std::move(layers));
}

ValueField random_zeta(const LatticeModel& lattice, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.05, 2.0);
  ValueField zeta(lattice, 1.0);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      double mean = 0.0;
      for (std::size_t c : lattice.children(t, n)) {
        zeta(t + 1, c) = weight(rng);
        mean += lattice.node(t + 1, c).probability * zeta(t + 1, c);
      }
      for (std::size_t c : lattice.children(t, n)) zeta(t + 1, c) /= mean;
    }
  }
  return zeta;
}

}  // namespace bermudan::lattice

namespace bermudan::lattice {

MartingaleField random_martingale(const LatticeModel& lattice, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(-scale, scale);
  ValueField values(lattice);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      double mean = 0.0;
      for (std::size_t c : lattice.children(t, n)) {
        values(t + 1, c) = step(rng);
        mean += lattice.node(t + 1, c).probability * values(t + 1, c);
      }
      for (std::size_t c : lattice.children(t, n)) values(t + 1, c) += values(t, n) - mean;
    }
  }
  return MartingaleField(lattice, std::move(values));
}

}  // namespace bermudan::lattice
