#include "bermudan/lattice_verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bermudan/lattice.hpp"
#include "bermudan/lattice_fixtures.hpp"

namespace bermudan::lattice {
namespace {

bool wants(const VerifyOptions& options, const std::string& group) {
  return options.fixtures.empty() ||
         std::find(options.fixtures.begin(), options.fixtures.end(), group) != options.fixtures.end();
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(12);
  out << value;
  return out.str();
}

double expectation(const PathTable& paths, const std::vector<double>& values) {
  double sum = 0.0;
  for (std::size_t p = 0; p < paths.size(); ++p) sum += paths.probability[p] * values[p];
  return sum;
}

// Adds eps * (1{first child} - p_first) below every node, accumulated forward.
MartingaleField perturb(const LatticeModel& lattice, const MartingaleField& m, double eps) {
  ValueField values = m.values();
  ValueField shift(lattice);
  for (std::size_t t = 0; t < lattice.horizon(); ++t) {
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
      const auto kids = lattice.children(t, n);
      const double p_first = lattice.node(t + 1, kids.front()).probability;
      for (std::size_t c : kids)
        shift(t + 1, c) = shift(t, n) + eps * ((c == kids.front() ? 1.0 : 0.0) - p_first);
    }
  }
  for (std::size_t t = 0; t <= lattice.horizon(); ++t)
    for (std::size_t n = 0; n < lattice.layer_size(t); ++n) values(t, n) += shift(t, n);
  return MartingaleField(lattice, std::move(values));
}

class Suite {
 public:
  explicit Suite(const VerifyOptions& options) : options_(options) {}

  void check(const std::string& name, bool passed, const std::string& detail = {}) {
    results_.push_back({name, passed, detail});
  }

  void optimal_not_sure() {
    const Fixture f = build_fixture("optimal_not_sure");
    const ValueField snell = snell_envelope(f.lattice);
    const PathTable paths = enumerate_paths(f.lattice);
    const auto theta = pathwise_dual_value(f.lattice, *f.martingale, 0);
    const double mean = expectation(paths, theta);
    const auto var = conditional_variance(f.lattice, *f.martingale, 0);
    const double tol = options_.tolerance;
    check("optimal_not_sure: Y*_0 = 2", std::abs(snell(0, 0) - 2.0) <= tol, "Y*_0=" + fmt(snell(0, 0)));
    check("optimal_not_sure: E theta_0 = 2", std::abs(mean - 2.0) <= tol, "E theta_0=" + fmt(mean));
    const bool values_ok = std::all_of(theta.begin(), theta.end(), [&](double v) {
      return std::abs(v - 1.0) <= tol || std::abs(v - 3.0) <= tol;
    });
    check("optimal_not_sure: theta_0 in {1, 3}", values_ok);
    check("optimal_not_sure: Var_0 theta_0 = 1", std::abs(var[0] - 1.0) <= tol, "Var=" + fmt(var[0]));
    check("optimal_not_sure: optimal but not surely optimal at 0",
          !is_surely_optimal(f.lattice, snell, *f.martingale, 0, tol));
  }

  void sure_not_hereditary() {
    const Fixture f = build_fixture("sure_not_hereditary");
    const ValueField snell = snell_envelope(f.lattice);
    const auto theta0 = pathwise_dual_value(f.lattice, *f.martingale, 0);
    const double tol = options_.tolerance;
    check("sure_not_hereditary: Y*_0 = 4", std::abs(snell(0, 0) - 4.0) <= tol);
    check("sure_not_hereditary: theta_0 = 4 on every path",
          std::all_of(theta0.begin(), theta0.end(), [&](double v) { return std::abs(v - 4.0) <= tol; }));
    check("sure_not_hereditary: surely optimal at 0",
          is_surely_optimal(f.lattice, snell, *f.martingale, 0, tol));
    check("sure_not_hereditary: not surely optimal at 1",
          !is_surely_optimal(f.lattice, snell, *f.martingale, 1, tol));
    const auto var1 = conditional_variance(f.lattice, *f.martingale, 1);
    check("sure_not_hereditary: theta_1 not F_1-measurable",
          std::all_of(var1.begin(), var1.end(), [&](double v) { return v > tol; }));
  }

  void counter1() {
    bool ok = true;
    std::string detail;
    for (std::size_t n = 2; n <= options_.counter1_max_n; ++n) {
      const Fixture f = build_fixture("counter1(" + std::to_string(n) + ")");
      const auto moments = dual_value_moments(f.lattice, *f.martingale, 0);
      const double nd = static_cast<double>(n);
      const double mean_err = std::abs(moments.mean[0] - (nd - 1.0) / nd);
      const double var_err = std::abs(moments.variance[0] - (nd - 1.0) / (nd * nd));
      if (mean_err > 1e-12 || var_err > 1e-12) {
        ok = false;
        detail = "n=" + std::to_string(n) + " mean err " + fmt(mean_err) + " var err " + fmt(var_err);
        break;
      }
    }
    check("counter1: Var_0 theta = (n-1)/n^2 and E theta = (n-1)/n, n=2.." +
              std::to_string(options_.counter1_max_n),
          ok, detail);
  }

  void random() {
    const double tol = options_.tolerance;
    std::size_t decomposition = 0, alsu = 0, stopping = 0, duality = 0, zeta_roundtrip = 0,
                alpha = 0, alpha0 = 0, surplus = 0, u_plus = 0, doob_u = 0;
    bool non_doob_u_nonmeasurable = false;
    const std::size_t count = options_.random_lattices;
    const std::size_t T = options_.random_horizon;

    for (std::size_t k = 0; k < count; ++k) {
      const LatticeModel lattice = random_lattice(T, options_.seed + k);
      const ValueField snell = snell_envelope(lattice);
      const auto doob = doob_decomposition(lattice, snell);
      const auto mult = multiplicative_doob(lattice, snell);
      const PathTable paths = enumerate_paths(lattice);

      bool exact = true;
      for (std::size_t t = 0; t <= T; ++t) {
        for (std::size_t n = 0; n < lattice.layer_size(t); ++n) {
          const double add = snell(0, 0) + doob.martingale(t, n) - doob.compensator(t, n);
          const double mul = snell(0, 0) * mult.martingale(t, n) * mult.drift(t, n);
          if (std::abs(add - snell(t, n)) > 1e-12 || std::abs(mul - snell(t, n)) > 1e-12) exact = false;
        }
      }
      decomposition += exact;

      const MartingaleField doob_m =
          options_.fault_inject ? perturb(lattice, doob.martingale, 1e-3) : doob.martingale;
      const auto theta0 = pathwise_dual_value(lattice, doob_m, 0);
      bool pathwise = std::all_of(theta0.begin(), theta0.end(),
                                  [&](double v) { return std::abs(v - snell(0, 0)) <= tol; });
      for (std::size_t i = 0; i <= T; ++i) pathwise = pathwise && is_surely_optimal(lattice, snell, doob_m, i, tol);
      alsu += pathwise;

      const ValueField stopped = stopped_payoff_value(lattice, first_optimal_stopping(lattice, snell));
      bool stop_ok = true;
      for (std::size_t t = 0; t <= T; ++t)
        for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
          stop_ok = stop_ok && std::abs(stopped(t, n) - snell(t, n)) <= tol;
      stopping += stop_ok;

      const MartingaleField generic = random_martingale(lattice, options_.seed * 31 + k);
      bool dual_ok = true;
      for (std::size_t i = 0; i <= T; ++i) {
        const auto moments = dual_value_moments(lattice, generic, i);
        for (std::size_t n = 0; n < lattice.layer_size(i); ++n)
          dual_ok = dual_ok && moments.mean[n] >= snell(i, n) - tol;
      }
      duality += dual_ok;

      const ValueField zeta = random_zeta(lattice, options_.seed * 17 + k);
      const MartingaleField from_zeta = martingale_from_zeta(lattice, snell, zeta);
      bool round_trip = true;
      for (std::size_t i = 0; i <= T; ++i) round_trip = round_trip && is_surely_optimal(lattice, snell, from_zeta, i, tol);
      try {
        validate_zeta(lattice, extract_zeta(lattice, snell, from_zeta), tol);
        validate_zeta(lattice, extract_zeta(lattice, snell, alpha_family(lattice, snell, 1.0)), tol);
      } catch (const std::exception&) {
        round_trip = false;
      }
      zeta_roundtrip += round_trip;

      bool alpha_ok = true;
      for (double a : {0.0, 0.25, 0.5, 1.0}) {
        const MartingaleField m = alpha_family(lattice, snell, a);
        for (std::size_t i = 0; i <= T; ++i) alpha_ok = alpha_ok && is_surely_optimal(lattice, snell, m, i, tol);
        const ValueField n_proc = surplus_process(lattice, snell, m);
        bool monotone = std::abs(n_proc(0, 0)) <= tol;
        for (std::size_t t = 1; t <= T; ++t)
          for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
            monotone = monotone && n_proc(t, n) >= n_proc(t - 1, lattice.node(t, n).parent) - tol;
        surplus += monotone;
        bool u_ok = true;
        for (const auto& c : u_plus_measurability_check(lattice, m, tol)) {
          u_ok = u_ok && c.positive_part_measurable && c.max_snell_gap <= tol;
          if (a > 0.0 && !c.measurable) non_doob_u_nonmeasurable = true;
        }
        u_plus += u_ok;
      }
      alpha += alpha_ok;

      const MartingaleField a0 = alpha_family(lattice, snell, 0.0);
      bool same = true;
      for (std::size_t t = 0; t <= T; ++t)
        for (std::size_t n = 0; n < lattice.layer_size(t); ++n)
          same = same && std::abs(a0(t, n) - doob.martingale(t, n)) <= tol;
      alpha0 += same;

      bool doob_measurable = true;
      for (const auto& c : u_plus_measurability_check(lattice, doob.martingale, tol))
        doob_measurable = doob_measurable && c.measurable;
      doob_u += doob_measurable;
    }

    const std::string of = " / " + std::to_string(count);
    check("random: Y* = Y*_0 + M* - A* = Y*_0 N* B*", decomposition == count, std::to_string(decomposition) + of);
    check("random: Doob martingale pathwise max equals Y*_0 and is surely optimal at all i",
          alsu == count, std::to_string(alsu) + of);
    check("random: first optimal stopping attains Y*", stopping == count, std::to_string(stopping) + of);
    check("random: duality E_i theta_i >= Y*_i for a generic martingale", duality == count,
          std::to_string(duality) + of);
    check("random: zeta round trip (surely optimal, extracted zeta valid)", zeta_roundtrip == count,
          std::to_string(zeta_roundtrip) + of);
    check("random: alpha family surely optimal for alpha in {0, 0.25, 0.5, 1}", alpha == count,
          std::to_string(alpha) + of);
    check("random: alpha = 0 reproduces the Doob martingale", alpha0 == count, std::to_string(alpha0) + of);
    check("random: surplus N nondecreasing with N_0 = 0", surplus == 4 * count,
          std::to_string(surplus) + " / " + std::to_string(4 * count));
    check("random: (U_i)^+ = Y*_{i-1} - Z_{i-1} is F_{i-1}-measurable", u_plus == 4 * count,
          std::to_string(u_plus) + " / " + std::to_string(4 * count));
    check("random: U_i measurable for the Doob martingale", doob_u == count, std::to_string(doob_u) + of);
    check("random: U_i non-measurable for some non-Doob surely optimal martingale",
          non_doob_u_nonmeasurable);
  }

  std::vector<PropertyResult> run() {
    if (wants(options_, "optimal_not_sure")) optimal_not_sure();
    if (wants(options_, "sure_not_hereditary")) sure_not_hereditary();
    if (wants(options_, "counter1")) counter1();
    if (wants(options_, "random")) random();
    return std::move(results_);
  }

 private:
  const VerifyOptions& options_;
  std::vector<PropertyResult> results_;
};

}  // namespace

std::vector<PropertyResult> run_lattice_verification(const VerifyOptions& options) {
  return Suite(options).run();
}

}  // namespace bermudan::lattice
