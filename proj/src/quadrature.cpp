#include "bermudan/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bermudan {

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
    throw ValidationError("quadrature: tolerances must be positive");
  if (max_subdivisions == 0) throw ValidationError("quadrature: need at least one panel");
  if (!(lower_truncation <= -8.0))
    throw ValidationError("quadrature: lower truncation must be at most -8");
}

namespace detail {

const KronrodRule& kronrod31() {
  static const KronrodRule rule = [] {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
    using Gauss = boost::math::quadrature::gauss<double, 15>;
    KronrodRule r{};
    for (std::size_t i = 0; i < 16; ++i) {
      r.nodes[i] = Kronrod::abscissa()[i];
      r.kronrod_weights[i] = Kronrod::weights()[i];
    }
    for (std::size_t i = 0; i < 8; ++i) r.gauss_weights[i] = Gauss::weights()[i];
    return r;
  }();
  return rule;
}

}  // namespace detail
}  // namespace bermudan
