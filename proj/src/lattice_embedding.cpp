#include "bermudan/lattice_embedding.hpp"

#include <algorithm>

#include "bermudan/error.hpp"

namespace bermudan {

LatticePathProblem::LatticePathProblem(const lattice::LatticeModel& lattice)
    : lattice_(lattice), paths_(lattice::enumerate_paths(lattice)) {
  const std::size_t T = lattice.horizon();
  if (T == 0) throw ValidationError("lattice problem: horizon must be at least 1");
  child_offset_.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto& offsets = child_offset_[t];
    offsets.assign(lattice.layer_size(t) + 1, 0);
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
      offsets[n + 1] = offsets[n] + lattice.children(t, n).size();
  }
}

double LatticePathProblem::payoff(std::size_t path, std::size_t i) const {
  return lattice_.payoff(i, paths_.at(path, i));
}

void LatticePathProblem::martingale_features(std::size_t path, std::size_t i,
                                             std::span<double> out) const {
  if (out.size() != martingale_count(i)) throw ValidationError("lattice problem: feature size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t parent = paths_.at(path, i);
  const std::size_t next = paths_.at(path, i + 1);
  const auto kids = lattice_.children(i, parent);
  for (std::size_t c = 0; c < kids.size(); ++c)
    out[child_offset_[i][parent] + c] =
        (kids[c] == next ? 1.0 : 0.0) - lattice_.node(i + 1, kids[c]).probability;
}

void LatticePathProblem::psi(std::size_t path, std::size_t i, std::span<double> out) const {
  if (out.size() != psi_count(i)) throw ValidationError("lattice problem: feature size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  out[paths_.at(path, i)] = 1.0;
}

lattice::MartingaleField LatticePathProblem::martingale(const DualCoefficients& coeffs) const {
  const std::size_t T = lattice_.horizon();
  if (coeffs.exercise_count() != T) throw ValidationError("lattice problem: coefficient count mismatch");
  lattice::ValueField values(lattice_);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& beta = coeffs.dates[t].beta;
    if (beta.size() != martingale_count(t)) throw ValidationError("lattice problem: coefficient size mismatch");
    for (std::size_t n = 0; n < lattice_.layer_size(t); ++n) {
      const auto kids = lattice_.children(t, n);
      double drift = 0.0;  // sum_c beta_c p_c
      for (std::size_t c = 0; c < kids.size(); ++c)
        drift += beta[child_offset_[t][n] + c] * lattice_.node(t + 1, kids[c]).probability;
      for (std::size_t c = 0; c < kids.size(); ++c)
        values(t + 1, kids[c]) = values(t, n) + beta[child_offset_[t][n] + c] - drift;
    }
  }
  return lattice::MartingaleField(lattice_, std::move(values));
}

}  // namespace bermudan
