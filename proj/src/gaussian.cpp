#include "sojourn/gaussian.hpp"

#include "sojourn/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

namespace sojourn {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  // erfc_inv keeps full relative accuracy in the lower tail.
  if (p < 0.5) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

}  // namespace sojourn
