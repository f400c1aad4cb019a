#include "sojourn/variance_theory.hpp"

#include "sojourn/errors.hpp"
#include "sojourn/gaussian.hpp"
#include "sojourn/hermite_chaos.hpp"
#include "sojourn/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

namespace sojourn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integral in θ with the upper limit given as asin ρ.
double indicator_cov_theta(double u, double theta_max, double rel_tol) {
  if (theta_max == 0.0) return 0.0;
  const double u2 = u * u;
  auto f = [u2](double theta) {
    const double den = 1.0 + std::sin(theta);
    if (u2 == 0.0) return 1.0;
    if (den <= 0.0) return 0.0;
    return std::exp(-u2 / den);
  };
  const double lo = std::min(0.0, theta_max);
  const double hi = std::max(0.0, theta_max);
  const double v = quad::gauss_kronrod(f, lo, hi, {rel_tol, 15}).value / kTwoPi;
  return theta_max < 0.0 ? -v : v;
}

// Same, from x = 1 - ρ ∈ [0, 2]; asin(1 - x) = π/2 - 2 asin(√(x/2)) keeps
// full precision as ρ → 1.
double indicator_cov_from_gap(double u, double x, double rel_tol) {
  const double theta_max = 0.5 * std::numbers::pi - 2.0 * std::asin(std::sqrt(0.5 * x));
  return indicator_cov_theta(u, theta_max, rel_tol);
}

// r ↦ Cov(1{X(0) ≥ u}, 1{X(t) ≥ u}) at ‖t‖ = r.
struct RadialCov {
  const CovarianceModel& model;
  double u;
  double rel_tol;
  double operator()(double r) const {
    const double gap = one_minus_rho_radial(model, r);
    if (gap < 0.5) return indicator_cov_from_gap(u, gap, rel_tol);
    return indicator_cov_theta(u, std::asin(rho_radial(model, r)), rel_tol);
  }
};

constexpr double kInnerTol = 1e-13;

// ∫ over {t ∈ [0,∞)^d : lo ≤ ‖t‖_∞ ≤ hi} of w(t)·g(‖t‖), times 2^d, for a weight
// symmetric in its coordinates. d = 2 runs over the octant 0 ≤ θ ≤ π/4.
template <class G, class W1, class W2>
double symmetric_box_integral(const CovarianceModel& model, G&& g, W1&& w1, W2&& w2, double lo,
                              double hi, double rel_tol) {
  const quad::Options opt{rel_tol, 15};
  const double length = model.scale;
  if (model.d == 1) {
    auto f = [&](double r) { return w1(r) * g(r); };
    if (lo == 0.0) return 2.0 * quad::half_line_pieces(f, hi, length, opt).value;
    return 2.0 * quad::gauss_kronrod(f, lo, hi, opt).value;
  }
  const quad::Options inner{std::max(rel_tol * 1e-3, 1e-13), 15};
  auto outer = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto f = [&](double r) { return w2(r * c, r * s) * g(r) * r; };
    const double r_hi = std::isinf(hi) ? hi : hi / c;
    if (lo == 0.0) return quad::half_line_pieces(f, r_hi, length, inner).value;
    return quad::gauss_kronrod(f, lo / c, r_hi, inner).value;
  };
  return 8.0 * quad::gauss_kronrod(outer, 0.0, std::numbers::pi / 4.0, {rel_tol, 12}).value;
}

template <class G>
double unweighted_box_integral(const CovarianceModel& model, G&& g, double lo, double hi,
                               double rel_tol) {
  return symmetric_box_integral(
      model, g, [](double) { return 1.0; }, [](double, double) { return 1.0; }, lo, hi, rel_tol);
}

template <class G>
double radial_integral_all_space(const CovarianceModel& model, G&& g, double rel_tol) {
  const quad::Options opt{rel_tol, 15};
  if (model.d == 1) return 2.0 * quad::half_line_pieces(g, kInf, model.scale, opt).value;
  auto f = [&](double r) { return kTwoPi * r * g(r); };
  return quad::half_line_pieces(f, kInf, model.scale, opt).value;
}

template <class G>
double window_weighted_integral(const CovarianceModel& model, G&& g, double T, double lo,
                                double hi, double rel_tol) {
  return symmetric_box_integral(
      model, g, [T](double t) { return T - t; },
      [T](double t1, double t2) { return (T - t1) * (T - t2); }, lo, hi, rel_tol);
}

}  // namespace

double bivariate_density(double u, double y) {
  if (!(std::abs(y) < 1.0)) throw DomainError("bivariate_density: |y| must be < 1");
  return std::exp(-u * u / (1.0 + y)) / (kTwoPi * std::sqrt((1.0 - y) * (1.0 + y)));
}

double covariance_of_indicators(double u, double rho, double rel_tol) {
  if (!(std::abs(rho) <= 1.0)) throw DomainError("covariance_of_indicators: |rho| must be <= 1");
  if (rho > 0.5) return indicator_cov_from_gap(u, 1.0 - rho, rel_tol);
  return indicator_cov_theta(u, std::asin(rho), rel_tol);
}

SigmaSquaredDetail sigma_squared_detail(const CovarianceModel& model, double u, double tol,
                                        int max_order) {
  if (!(tol > 0.0)) throw DomainError("sigma_squared: tol must be > 0");
  if (!model.integrable()) throw DivergenceError("sigma_squared: covariance is not integrable");

  SigmaSquaredDetail out;
  out.en1_constant = en1_constant(u, 2000);
  // n! c_n² = pref · h²_{n-1}(u) / n, and h²_{m} ≤ C_u² (2π m)^{-1/2}.
  const double pref = std::exp(-0.5 * u * u) / kTwoPi;
  const double majorant =
      pref * out.en1_constant * out.en1_constant / std::sqrt(kTwoPi) * 2.0;

  double h_prev = 0.0;
  double h_cur = 1.0;
  double log_scale = -0.25 * u * u;
  double factor = std::exp(log_scale);
  double sum = 0.0;
  bool done = false;
  int n = 1;
  for (; n <= max_order; ++n) {
    // h_{n-1} = h_cur · e^{log_scale}; the rescale only matters for large u.
    const double h = h_cur * factor;
    sum += pref * h * h / n * rho_power_integral(model, n);
    if (n >= 2 && (n % 16 == 0 || n < 64)) {
      out.tail_bound = majorant * rho_power_integral(model, n + 1.0) / std::sqrt(n - 1.0);
      if (out.tail_bound < tol) {
        done = true;
        break;
      }
    }
    const double m = n - 1.0;
    const double next = (u * h_cur - std::sqrt(m) * h_prev) / std::sqrt(m + 1.0);
    h_prev = h_cur;
    h_cur = next;
    if (std::abs(h_cur) > 1e150) {
      h_cur *= 1e-150;
      h_prev *= 1e-150;
      log_scale += 150.0 * std::numbers::ln10;
      factor = std::exp(log_scale);
    }
  }
  if (!done) {
    throw ConvergenceError("sigma_squared: tail majorant above tol after " +
                           std::to_string(max_order) + " terms");
  }
  out.terms = n;
  out.value = sum;

  const RadialCov g{model, u, kInnerTol};
  out.integral = radial_integral_all_space(model, g, std::min(1e-10, tol));
  if (std::abs(out.integral - out.value) > 10.0 * tol) {
    throw CrossValidationError("sigma_squared: series " + std::to_string(out.value) +
                               " and integral " + std::to_string(out.integral) +
                               " disagree beyond 10*tol");
  }
  return out;
}

double sigma_squared(const CovarianceModel& model, double u, double tol) {
  return sigma_squared_detail(model, u, tol).value;
}

double var_sojourn_exact(const CovarianceModel& model, double T, double u, double rel_tol) {
  if (!(T > 0.0)) throw DomainError("var_sojourn_exact: T must be > 0");
  const RadialCov g{model, u, kInnerTol};
  return window_weighted_integral(model, g, T, 0.0, T, rel_tol);
}

double localization_eps(const CovarianceModel& model, double level) {
  return radius_at_decorrelation(model, level) / std::sqrt(static_cast<double>(model.d));
}

double localized_variance(const CovarianceModel& model, double u, double eps, double rel_tol) {
  if (!(eps > 0.0)) throw DomainError("localized_variance: eps must be > 0");
  const RadialCov g{model, u, kInnerTol};
  return unweighted_box_integral(model, g, 0.0, eps, rel_tol);
}

double berman_localization_ratio(const CovarianceModel& model, double u, double T, double eps) {
  if (!(eps > 0.0 && eps < T)) throw DomainError("berman_localization_ratio: need 0 < eps < T");
  const RadialCov g{model, u, kInnerTol};
  const double inside = window_weighted_integral(model, g, T, 0.0, eps, 1e-10);
  const double outside = window_weighted_integral(model, g, T, eps, T, 1e-10);
  if (!(inside > std::numeric_limits<double>::min())) return kInf;
  return outside / inside;
}

double berman_constant(const CovarianceModel& model) {
  const LocalExponent le = local_exponent_closed_form(model);
  static std::mutex mu;
  static std::map<std::tuple<double, double, int>, double> cache;
  const auto key = std::make_tuple(le.alpha, le.C, model.d);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto g = [&](double z) { return normal_tail(std::sqrt(0.5 * le.C * std::pow(z, le.alpha))); };
  // Natural length: where C z^α / 2 is of order one.
  CovarianceModel unit = model;
  unit.scale = std::pow(2.0 / le.C, 1.0 / le.alpha);
  const double value = radial_integral_all_space(unit, g, 1e-12);
  std::lock_guard lock(mu);
  cache.emplace(key, value);
  return value;
}

double berman_B_asymptotic(const CovarianceModel& model, double u) {
  if (!(u > 0.0)) throw DomainError("berman_B_asymptotic: u must be > 0");
  const LocalExponent le = local_exponent_closed_form(model);
  const double expo = 1.0 + 2.0 * model.d / le.alpha;
  return 2.0 * std::exp(log_normal_pdf(u) - expo * std::log(u)) * berman_constant(model);
}

double berman_lower_bound_audit(const CovarianceModel& model, double u, double theta) {
  if (!(theta > 1.0)) throw DomainError("berman_lower_bound_audit: theta must be > 1");
  const double b = localized_variance(model, u, localization_eps(model));
  if (b <= 0.0) return 0.0;
  return std::exp(std::log(b) + 0.5 * u * u * theta);
}

BermanBounds berman_two_sided_bounds(const CovarianceModel& model, double u, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("berman_two_sided_bounds: delta must lie in (0, 1)");
  if (!(u > 0.0)) throw DomainError("berman_two_sided_bounds: u must be > 0");
  BermanBounds out;
  try {
    out.eps = localization_eps(model, delta);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("berman_two_sided_bounds: no neighborhood with 1 - rho < delta: ") +
                           e.what());
  }
  auto box = [&](double kappa) {
    auto g = [&](double r) { return normal_tail(u * std::sqrt(one_minus_rho_radial(model, r) / kappa)); };
    return unweighted_box_integral(model, g, 0.0, out.eps, 1e-11);
  };
  const double phi_over_u = normal_pdf(u) / u;
  out.upper = 2.0 * std::sqrt(2.0 / (2.0 - delta)) * phi_over_u * box(2.0);
  out.lower = std::sqrt(2.0 * (2.0 - delta)) * phi_over_u * box(2.0 - delta);
  return out;
}

VarianceBreakdown variance_breakdown(const CovarianceModel& model, double T, double u,
                                     bool with_series) {
  VarianceBreakdown out;
  out.T = T;
  out.u = u;
  out.exact = var_sojourn_exact(model, T, u);
  out.series_sigma2 = with_series ? sigma_squared(model, u) : std::numeric_limits<double>::quiet_NaN();
  out.asymptotic = u > 0.0 ? std::pow(T, model.d) * berman_B_asymptotic(model, u)
                           : std::numeric_limits<double>::quiet_NaN();
  out.ratio = out.exact / out.asymptotic;
  return out;
}

}  // namespace sojourn
