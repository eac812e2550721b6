#pragma once

// Regression bases for the backward pass.
//
// For the exercise interval [T_i, T_{i+1}) there are two families:
//   continuation features psi(i, X_{T_i}), regressors for E_i theta_{i+1};
//   martingale integrands phi(t, X_t), one per Brownian component, turned into
//   features by the left-point Euler sum  sum_s phi(t_s, X_s) (W_{s+1} - W_s).
// The European options still alive on the interval (maturing at T_{i+1} and
// at T_J) enter psi through their values and phi through their deltas.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bermudan/gbm.hpp"
#include "bermudan/quadrature.hpp"

namespace bermudan {

struct BasisOptions {
  std::size_t degree = 3;
  // Full multivariate monomials in the state instead of per-component powers.
  bool cross_terms = false;
  bool psi_state = true;     // monomials of X
  bool psi_european = true;  // powers of the alive European values
  bool phi_constant = true;  // raw Brownian increments
  bool phi_deltas = true;    // e^{-rt} X^d dEP/dX^d for the alive maturities
  // Quadrature for max-call European values inside the features.
  QuadratureSpec quadrature{1e-6, 1e-9, 200, -8.0};

  void validate() const;
};

class BasisSet {
 public:
  BasisSet(GbmModel model, TimeGrid grid, BasisOptions options = {});

  const GbmModel& model() const { return model_; }
  const TimeGrid& grid() const { return grid_; }
  const BasisOptions& options() const { return options_; }
  std::size_t dimension() const { return model_.dimension(); }

  // Continuation features at exercise date i (0 for i = J).
  std::size_t psi_count(std::size_t i) const;
  std::vector<std::string> psi_names(std::size_t i) const;
  void psi(std::size_t i, std::span<const double> state, std::span<double> out) const;

  // Martingale features for the interval [T_i, T_{i+1}), i < J: one per
  // (integrand, component) pair, integrand-major.
  std::size_t martingale_count(std::size_t i) const;
  std::vector<std::string> martingale_names(std::size_t i) const;
  // Integrand values at time t in [T_i, T_{i+1}) and state x.
  void integrands(std::size_t i, double t, std::span<const double> state,
                  std::span<double> out) const;
  // Euler sums over the interval using the path's own increments.
  void martingale_features(const PathBatch& batch, std::size_t path, std::size_t i,
                           std::span<double> out) const;

  // Canonical text identifying model, grid and basis; hash() is its FNV-1a.
  std::string description() const;
  std::uint64_t hash() const;

 private:
  bool final_is_next(std::size_t i) const { return i + 1 == grid_.exercise_count(); }
  std::size_t european_count(std::size_t i) const { return final_is_next(i) ? 1 : 2; }
  // Exercise indices of the European maturities alive on [T_i, T_{i+1}).
  struct Maturities {
    std::array<std::size_t, 2> index;
    std::size_t count;
    const std::size_t* begin() const { return index.data(); }
    const std::size_t* end() const { return index.data() + count; }
  };
  Maturities maturities(std::size_t i) const {
    return {{i + 1, grid_.exercise_count()}, final_is_next(i) ? 1u : 2u};
  }
  std::size_t integrand_count(std::size_t i) const;
  // Price of the European maturing at exercise date m, seen at (t, state).
  double european_quote(std::size_t m, double t, std::span<const double> state,
                        std::span<double> deltas) const;

  GbmModel model_;
  TimeGrid grid_;
  BasisOptions options_;
  // Exponent vectors of the state monomials (each of length D).
  std::vector<std::vector<unsigned>> monomials_;
};

BasisSet default_basis(const GbmModel& model, const TimeGrid& grid, BasisOptions options = {});

// Regression data for one exercise date: rows are paths.
struct DesignBlock {
  Eigen::MatrixXd m;          // martingale features, N x K
  Eigen::MatrixXd psi;        // continuation features, N x K1
  Eigen::VectorXd response;   // theta_{i+1}
  Eigen::VectorXd weights;    // empty for unit weights

  std::size_t rows() const { return static_cast<std::size_t>(response.size()); }
  void validate() const;
};

DesignBlock assemble_block(const PathBatch& batch, const BasisSet& basis, std::size_t i,
                           std::span<const double> theta_next);

// Sum_k gamma_k psi_k(i, state); 0 at maturity (i = J).
double evaluate_continuation(std::span<const double> gamma, const BasisSet& basis, std::size_t i,
                             std::span<const double> state);

}  // namespace bermudan
