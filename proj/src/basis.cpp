#include "bermudan/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "bermudan/error.hpp"
#include "bermudan/european.hpp"
#include "bermudan/hash.hpp"
#include "bermudan/parallel.hpp"

namespace bermudan {
namespace {

constexpr std::size_t kMaxDimension = 64;
constexpr std::size_t kMaxIntegrands = 3;

// Exponent vectors with total degree 1..degree, graded then lexicographic.
void graded_monomials(std::size_t dim, std::size_t degree,
                      std::vector<std::vector<unsigned>>& out) {
  for (std::size_t total = 1; total <= degree; ++total) {
    std::vector<unsigned> e(dim, 0);
    // Enumerate compositions of `total` into `dim` parts.
    auto rec = [&](auto&& self, std::size_t d, unsigned left) -> void {
      if (d + 1 == dim) {
        e[d] = left;
        out.push_back(e);
        return;
      }
      for (unsigned k = left + 1; k-- > 0;) {
        e[d] = k;
        self(self, d + 1, left - k);
      }
    };
    rec(rec, 0, static_cast<unsigned>(total));
  }
}

std::string monomial_name(const std::vector<unsigned>& e) {
  std::string name;
  for (std::size_t d = 0; d < e.size(); ++d) {
    if (e[d] == 0) continue;
    if (!name.empty()) name += '*';
    name += "x" + std::to_string(d + 1);
    if (e[d] > 1) name += "^" + std::to_string(e[d]);
  }
  return name;
}

std::string maturity_label(std::size_t m, std::size_t last) {
  return m == last ? "final" : "next";
}

}  // namespace

void BasisOptions::validate() const {
  if (degree == 0) throw ValidationError("basis: degree must be at least 1");
  if (degree > 8) throw ValidationError("basis: degree above 8 is not supported");
  if (!phi_constant && !phi_deltas)
    throw ValidationError("basis: at least one martingale integrand family is required");
  quadrature.validate();
}

BasisSet::BasisSet(GbmModel model, TimeGrid grid, BasisOptions options)
    : model_(std::move(model)), grid_(grid), options_(options) {
  model_.validate();
  options_.validate();
  const std::size_t dim = model_.dimension();
  if (dim > kMaxDimension) throw ValidationError("basis: at most 64 assets are supported");
  if (options_.psi_state) {
    if (options_.cross_terms) {
      graded_monomials(dim, options_.degree, monomials_);
    } else {
      for (unsigned p = 1; p <= options_.degree; ++p)
        for (std::size_t d = 0; d < dim; ++d) {
          std::vector<unsigned> e(dim, 0);
          e[d] = p;
          monomials_.push_back(std::move(e));
        }
    }
  }
}

std::size_t BasisSet::psi_count(std::size_t i) const {
  const std::size_t J = grid_.exercise_count();
  if (i > J) throw ValidationError("basis: exercise index out of range");
  if (i == J) return 0;
  if (i == 0) return 1;
  std::size_t count = 1 + monomials_.size();
  if (options_.psi_european) count += european_count(i) * options_.degree;
  return count;
}

std::vector<std::string> BasisSet::psi_names(std::size_t i) const {
  std::vector<std::string> names;
  const std::size_t J = grid_.exercise_count();
  if (psi_count(i) == 0) return names;
  names.push_back("1");
  if (i == 0) return names;
  for (const auto& e : monomials_) names.push_back(monomial_name(e));
  if (options_.psi_european) {
    for (std::size_t m : maturities(i)) {
      for (std::size_t p = 1; p <= options_.degree; ++p)
        names.push_back("EP_" + maturity_label(m, J) + (p > 1 ? "^" + std::to_string(p) : ""));
    }
  }
  return names;
}

double BasisSet::european_quote(std::size_t m, double t, std::span<const double> state,
                                std::span<double> deltas) const {
  const double tau = std::max(grid_.exercise_time(m) - t, 0.0);
  switch (model_.payoff) {
    case PayoffKind::basket_put:
      return basket_put_moment_match(state, model_.strike, model_.rate, model_.volatility, tau,
                                     model_.dividend, deltas);
    case PayoffKind::max_call:
      return max_call_quote(state, model_.strike, model_.rate, model_.dividend, model_.volatility,
                            tau, options_.quadrature, deltas);
  }
  return 0.0;
}

void BasisSet::psi(std::size_t i, std::span<const double> state, std::span<double> out) const {
  const std::size_t count = psi_count(i);
  const std::size_t dim = dimension();
  if (out.size() != count) throw ValidationError("basis: psi output size mismatch");
  if (state.size() != dim) throw ValidationError("basis: state dimension mismatch");
  if (count == 0) return;
  out[0] = 1.0;
  if (i == 0) return;
  std::size_t k = 1;
  if (!monomials_.empty()) {
    std::array<std::array<double, 9>, kMaxDimension> powers;
    for (std::size_t d = 0; d < dim; ++d) {
      powers[d][0] = 1.0;
      for (std::size_t p = 1; p <= options_.degree; ++p) powers[d][p] = powers[d][p - 1] * state[d];
    }
    for (const auto& e : monomials_) {
      double v = 1.0;
      for (std::size_t d = 0; d < dim; ++d) v *= powers[d][e[d]];
      out[k++] = v;
    }
  }
  if (options_.psi_european) {
    std::array<double, kMaxDimension> deltas;
    const double t = grid_.exercise_time(i);
    for (std::size_t m : maturities(i)) {
      const double ep = european_quote(m, t, state, std::span(deltas.data(), dim));
      double v = 1.0;
      for (std::size_t p = 1; p <= options_.degree; ++p) {
        v *= ep;
        out[k++] = v;
      }
    }
  }
}

std::size_t BasisSet::integrand_count(std::size_t i) const {
  return (options_.phi_constant ? 1 : 0) + (options_.phi_deltas ? european_count(i) : 0);
}

std::size_t BasisSet::martingale_count(std::size_t i) const {
  if (i >= grid_.exercise_count()) throw ValidationError("basis: interval index out of range");
  return integrand_count(i) * dimension();
}

std::vector<std::string> BasisSet::martingale_names(std::size_t i) const {
  std::vector<std::string> names;
  const std::size_t dim = dimension();
  const std::size_t J = grid_.exercise_count();
  martingale_count(i);
  if (options_.phi_constant)
    for (std::size_t d = 0; d < dim; ++d) names.push_back("dW" + std::to_string(d + 1));
  if (options_.phi_deltas) {
    for (std::size_t m : maturities(i)) {
      for (std::size_t d = 0; d < dim; ++d)
        names.push_back("x" + std::to_string(d + 1) + "*dEP_" + maturity_label(m, J) + "/dx" +
                        std::to_string(d + 1) + "*dW" + std::to_string(d + 1));
    }
  }
  return names;
}

void BasisSet::integrands(std::size_t i, double t, std::span<const double> state,
                          std::span<double> out) const {
  const std::size_t dim = dimension();
  if (out.size() != martingale_count(i)) throw ValidationError("basis: integrand output size mismatch");
  std::size_t k = 0;
  if (options_.phi_constant)
    for (std::size_t d = 0; d < dim; ++d) out[k++] = 1.0;
  if (options_.phi_deltas) {
    const double discount = std::exp(-model_.rate * t);
    std::array<double, kMaxDimension> deltas;
    for (std::size_t m : maturities(i)) {
      european_quote(m, t, state, std::span(deltas.data(), dim));
      for (std::size_t d = 0; d < dim; ++d) out[k++] = discount * state[d] * deltas[d];
    }
  }
}

void BasisSet::martingale_features(const PathBatch& batch, std::size_t path, std::size_t i,
                                   std::span<double> out) const {
  const std::size_t dim = dimension();
  const std::size_t count = martingale_count(i);
  if (batch.dimension() != dim) throw ValidationError("basis: batch dimension mismatch");
  if (batch.grid().total_steps() != grid_.total_steps() ||
      batch.grid().exercise_count() != grid_.exercise_count())
    throw ValidationError("basis: batch grid does not match the basis grid");
  if (out.size() != count) throw ValidationError("basis: feature output size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  std::array<double, kMaxIntegrands * kMaxDimension> phi;
  const std::span<double> phi_view(phi.data(), count);
  for (std::size_t s = grid_.fine_index(i); s < grid_.fine_index(i + 1); ++s) {
    integrands(i, grid_.time(s), batch.state(path, s), phi_view);
    const auto dw = batch.increment(path, s);
    for (std::size_t k = 0; k < count; ++k) out[k] += phi[k] * dw[k % dim];
  }
}

std::string BasisSet::description() const {
  std::ostringstream out;
  out.precision(17);
  out << "payoff=" << to_string(model_.payoff) << ";rate=" << model_.rate
      << ";dividend=" << model_.dividend << ";volatility=" << model_.volatility
      << ";strike=" << model_.strike << ";spot=";
  for (std::size_t d = 0; d < model_.spot.size(); ++d) out << (d ? "," : "") << model_.spot[d];
  out << ";maturity=" << grid_.maturity() << ";exercise_dates=" << grid_.exercise_count()
      << ";substeps=" << grid_.substeps() << ";degree=" << options_.degree
      << ";cross_terms=" << options_.cross_terms << ";psi_state=" << options_.psi_state
      << ";psi_european=" << options_.psi_european << ";phi_constant=" << options_.phi_constant
      << ";phi_deltas=" << options_.phi_deltas;
  return out.str();
}

std::uint64_t BasisSet::hash() const { return fnv1a(description()); }

BasisSet default_basis(const GbmModel& model, const TimeGrid& grid, BasisOptions options) {
  return BasisSet(model, grid, options);
}

void DesignBlock::validate() const {
  const auto n = response.size();
  if (m.rows() != n || psi.rows() != n)
    throw ValidationError("design block: feature rows do not match the response length");
  if (weights.size() != 0 && weights.size() != n)
    throw ValidationError("design block: weight count does not match the response length");
  for (Eigen::Index k = 0; k < weights.size(); ++k)
    if (!(weights[k] >= 0.0)) throw ValidationError("design block: negative weight");
  if (!m.allFinite() || !psi.allFinite() || !response.allFinite())
    throw NumericalError("design block: non-finite feature or response");
}

DesignBlock assemble_block(const PathBatch& batch, const BasisSet& basis, std::size_t i,
                           std::span<const double> theta_next) {
  const std::size_t n = batch.size();
  if (theta_next.size() != n)
    throw ValidationError("assemble_block: response length " + std::to_string(theta_next.size()) +
                          " does not match " + std::to_string(n) + " paths");
  if (i >= basis.grid().exercise_count())
    throw ValidationError("assemble_block: exercise index out of range");
  const std::size_t k = basis.martingale_count(i);
  const std::size_t k1 = basis.psi_count(i);
  DesignBlock block;
  block.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  block.psi.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k1));
  block.response = Eigen::Map<const Eigen::VectorXd>(theta_next.data(), static_cast<Eigen::Index>(n));

  constexpr std::size_t kChunk = 64;
  const std::size_t fine = basis.grid().fine_index(i);
  parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t chunk) {
    std::vector<double> mrow(k), prow(k1);
    for (std::size_t p = chunk * kChunk; p < std::min(n, (chunk + 1) * kChunk); ++p) {
      basis.martingale_features(batch, p, i, mrow);
      basis.psi(i, batch.state(p, fine), prow);
      const auto row = static_cast<Eigen::Index>(p);
      for (std::size_t c = 0; c < k; ++c) block.m(row, static_cast<Eigen::Index>(c)) = mrow[c];
      for (std::size_t c = 0; c < k1; ++c) block.psi(row, static_cast<Eigen::Index>(c)) = prow[c];
    }
  });
  return block;
}

double evaluate_continuation(std::span<const double> gamma, const BasisSet& basis, std::size_t i,
                             std::span<const double> state) {
  const std::size_t k1 = basis.psi_count(i);
  if (k1 == 0) return 0.0;
  if (gamma.size() != k1)
    throw ValidationError("evaluate_continuation: coefficient count does not match the basis");
  std::array<double, 4096> buf;
  std::vector<double> heap;
  std::span<double> features;
  if (k1 <= buf.size()) {
    features = std::span(buf.data(), k1);
  } else {
    heap.resize(k1);
    features = heap;
  }
  basis.psi(i, state, features);
  double value = 0.0;
  for (std::size_t k = 0; k < k1; ++k) value += gamma[k] * features[k];
  return value;
}

}  // namespace bermudan
