#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <utility>

namespace sojourn::quad {

struct Options {
  double rel_tol = 1e-8;
  unsigned max_depth = 18;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss–Kronrod (G15/K31). Either bound may be infinite.
///
/// Finite intervals are mapped onto [-1, 1] first: the Boost recursion compares
/// the error of the unscaled rule with the scaled estimate, so on a short
/// interval a tight relative tolerance is otherwise never met.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, const Options& opt = {}) {
  Result r;
  if (a == b) return r;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (std::isfinite(a) && std::isfinite(b)) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double x) { return f(mid + half * x) * half; };
    r.value = Rule::integrate(g, -1.0, 1.0, opt.max_depth, opt.rel_tol, &r.error);
    return r;
  }
  r.value = Rule::integrate(std::forward<F>(f), a, b, opt.max_depth, opt.rel_tol, &r.error);
  return r;
}

/// Tanh–sinh on a finite interval; robust against integrable endpoint singularities.
template <class F>
Result tanh_sinh(F&& f, double a, double b, const Options& opt = {}) {
  Result r;
  if (a == b) return r;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double l1 = 0.0;
  r.value = integrator.integrate(std::forward<F>(f), a, b, opt.rel_tol, &r.error, &l1);
  return r;
}

/// ∫_lo^∞ f with t = lo/w, so algebraic tails t^{-p} become w^{p-2} on (0, 1].
template <class F>
Result to_infinity(F&& f, double lo, const Options& opt = {}) {
  auto g = [&](double w) {
    const double t = lo / w;
    if (!std::isfinite(t)) return 0.0;
    return f(t) * t / w;
  };
  return tanh_sinh(g, 0.0, 1.0, opt);
}

/// ∫_0^b f over the decade breakpoints length·10^k (k ≥ -6). The first
/// piece uses t = w² so that √t-type cusps at the origin become smooth.
template <class F>
Result half_line_pieces(F&& f, double b, double length, const Options& opt = {}) {
  Result total;
  if (b <= 0.0) return total;
  double lo = 0.0;
  double hi = std::min(b, length * 1e-6);
  {
    auto g = [&](double w) { return 2.0 * w * f(w * w); };
    const Result piece = gauss_kronrod(g, 0.0, std::sqrt(hi), opt);
    total.value += piece.value;
    total.error += piece.error;
  }
  while (hi < b) {
    lo = hi;
    hi = std::isinf(b) && lo >= length * 1e4 ? b : std::min(b, lo * 10.0);
    const Result piece = std::isinf(hi) ? to_infinity(f, lo, opt) : gauss_kronrod(f, lo, hi, opt);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

}  // namespace sojourn::quad
