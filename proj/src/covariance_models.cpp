#include "sojourn/covariance_models.hpp"

#include "sojourn/errors.hpp"
#include "sojourn/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace sojourn {

std::string to_string(CovarianceKind kind) {
  switch (kind) {
    case CovarianceKind::powered_exponential:
      return "powered_exponential";
    case CovarianceKind::cauchy:
      return "cauchy";
  }
  return "unknown";
}

CovarianceKind parse_covariance_kind(std::string_view name) {
  if (name == "powered_exponential") return CovarianceKind::powered_exponential;
  if (name == "cauchy") return CovarianceKind::cauchy;
  throw ConfigError("unknown covariance kind '" + std::string(name) + "'");
}

CovarianceModel CovarianceModel::powered_exponential(double alpha, double scale, int d) {
  CovarianceModel m;
  m.kind = CovarianceKind::powered_exponential;
  m.alpha = alpha;
  m.scale = scale;
  m.d = d;
  m.validate();
  return m;
}

CovarianceModel CovarianceModel::cauchy(double beta, double scale, int d) {
  CovarianceModel m;
  m.kind = CovarianceKind::cauchy;
  m.beta = beta;
  m.scale = scale;
  m.d = d;
  m.validate();
  return m;
}

void CovarianceModel::validate() const {
  if (d != 1 && d != 2) throw DomainError("covariance model: d must be 1 or 2");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("covariance model: scale must be > 0");
  if (kind == CovarianceKind::powered_exponential && !(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("powered_exponential: alpha must lie in (0, 2]");
  }
  if (kind == CovarianceKind::cauchy && !(beta > 0.0) ) {
    throw DomainError("cauchy: beta must be > 0");
  }
}

bool CovarianceModel::integrable() const {
  return kind == CovarianceKind::powered_exponential || beta > 0.5 * d;
}

std::string CovarianceModel::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(";
  if (kind == CovarianceKind::powered_exponential) {
    os << "alpha=" << alpha;
  } else {
    os << "beta=" << beta;
  }
  os << ", scale=" << scale << ", d=" << d << ")";
  return os.str();
}

double rho_radial(const CovarianceModel& model, double r) {
  const double x = std::abs(r) / model.scale;
  if (model.kind == CovarianceKind::powered_exponential) return std::exp(-std::pow(x, model.alpha));
  return std::pow(1.0 + x * x, -model.beta);
}

double one_minus_rho_radial(const CovarianceModel& model, double r) {
  const double x = std::abs(r) / model.scale;
  if (model.kind == CovarianceKind::powered_exponential) return -std::expm1(-std::pow(x, model.alpha));
  return -std::expm1(-model.beta * std::log1p(x * x));
}

double rho(const CovarianceModel& model, std::span<const double> t) {
  if (static_cast<int>(t.size()) != model.d) throw DomainError("rho: point dimension mismatch");
  double r2 = 0.0;
  for (const double ti : t) r2 += ti * ti;
  return rho_radial(model, std::sqrt(r2));
}

double rho_power_integral(const CovarianceModel& model, double n) {
  if (!(n >= 1.0)) throw DomainError("rho_power_integral: n must be >= 1");
  const double s = model.scale;
  if (model.kind == CovarianceKind::powered_exponential) {
    const double a = model.alpha;
    if (model.d == 1) return 2.0 * s * std::tgamma(1.0 + 1.0 / a) * std::pow(n, -1.0 / a);
    return std::numbers::pi * s * s * std::tgamma(1.0 + 2.0 / a) * std::pow(n, -2.0 / a);
  }
  const double b = model.beta * n;
  if (!(b > 0.5 * model.d)) {
    throw DivergenceError("cauchy: integral of rho^n diverges for beta*n <= d/2");
  }
  if (model.d == 1) {
    return s * std::sqrt(std::numbers::pi) * std::exp(std::lgamma(b - 0.5) - std::lgamma(b));
  }
  return std::numbers::pi * s * s / (b - 1.0);
}

double l1_norm(const CovarianceModel& model) {
  // Both families are nonnegative, so ∫|ρ| = ∫ρ.
  return rho_power_integral(model, 1.0);
}

namespace {

double radial_integral(const CovarianceModel& model, int n, double rel_tol) {
  const quad::Options opt{rel_tol, 20};
  auto f = [&](double r) {
    const double v = std::pow(rho_radial(model, r), n);
    return model.d == 1 ? 2.0 * v : 2.0 * std::numbers::pi * r * v;
  };
  return quad::half_line_pieces(f, std::numeric_limits<double>::infinity(), model.scale, opt).value;
}

// Beyond this radius ρ < e^{-92}; adaptive rules otherwise chase round-off in
// the underflowing tail of the exponential family.
double negligible_radius(const CovarianceModel& model) {
  if (model.kind == CovarianceKind::powered_exponential) {
    return model.scale * std::pow(92.0, 1.0 / model.alpha);
  }
  return std::numeric_limits<double>::infinity();
}

// ∫_0^R r ρ(r) dr and its complement ∫_R^∞ r ρ(r) dr, both without cancellation.
double radial_mass_inside(const CovarianceModel& model, double R) {
  const double s2 = model.scale * model.scale;
  const double x = R / model.scale;
  if (model.kind == CovarianceKind::powered_exponential) {
    const double k = 2.0 / model.alpha;
    return s2 / model.alpha * std::tgamma(k) * boost::math::gamma_p(k, std::pow(x, model.alpha));
  }
  const double b = model.beta;
  if (b == 1.0) return 0.5 * s2 * std::log1p(x * x);
  return 0.5 * s2 * -std::expm1((1.0 - b) * std::log1p(x * x)) / (b - 1.0);
}

double radial_mass_outside(const CovarianceModel& model, double R) {
  const double s2 = model.scale * model.scale;
  const double x = R / model.scale;
  if (model.kind == CovarianceKind::powered_exponential) {
    const double k = 2.0 / model.alpha;
    return s2 / model.alpha * std::tgamma(k) * boost::math::gamma_q(k, std::pow(x, model.alpha));
  }
  if (!(model.beta > 1.0)) return std::numeric_limits<double>::infinity();
  return 0.5 * s2 * std::exp((1.0 - model.beta) * std::log1p(x * x)) / (model.beta - 1.0);
}

// In d = 2 the square [-a,a]² splits into 8 copies of the octant
// 0 ≤ θ ≤ π/4, r ≤ a/cos θ.
template <class G>
double octant_integral(G&& radial, double a, double rel_tol) {
  auto f = [&](double theta) { return radial(a / std::cos(theta)); };
  return 8.0 * quad::gauss_kronrod(f, 0.0, std::numbers::pi / 4.0, {rel_tol, 15}).value;
}

}  // namespace

double l1_norm_quadrature(const CovarianceModel& model, double rel_tol) {
  if (!model.integrable()) throw DivergenceError("l1_norm: covariance is not integrable");
  return radial_integral(model, 1, rel_tol);
}

double rho_power_integral_quadrature(const CovarianceModel& model, int n, double rel_tol) {
  if (n < 1) throw DomainError("rho_power_integral: n must be >= 1");
  return radial_integral(model, n, rel_tol);
}

double box_l1(const CovarianceModel& model, double a, double rel_tol) {
  if (!(a > 0.0)) throw DomainError("box_l1: a must be > 0");
  const quad::Options opt{rel_tol, 20};
  if (model.d == 1) {
    auto f = [&](double t) { return rho_radial(model, t); };
    return 2.0 * quad::half_line_pieces(f, a, model.scale, opt).value;
  }
  return octant_integral([&](double R) { return radial_mass_inside(model, R); }, a, rel_tol);
}

TailL1 tail_l1(const CovarianceModel& model, double a, double rel_tol) {
  if (!(a > 0.0)) throw DomainError("tail_l1: a must be > 0");
  if (!model.integrable()) throw DivergenceError("tail_l1: covariance is not integrable");
  const quad::Options opt{rel_tol, 20};
  const double r_cut = negligible_radius(model);
  TailL1 out;
  if (a >= r_cut) {
    out.log_ratio = 0.0;
    return out;
  }
  // [a, r_cut) split at decades of a so the adaptive rule sees the decay scale.
  auto beyond = [&](auto&& f) {
    double total = 0.0;
    double lo = a;
    for (int k = 0; k < 6 && lo < r_cut; ++k) {
      const double hi = std::min(lo * 10.0, r_cut);
      total += quad::gauss_kronrod(f, lo, hi, opt).value;
      lo = hi;
    }
    if (lo >= r_cut) return total;
    return total + (std::isinf(r_cut) ? quad::to_infinity(f, lo, opt) : quad::gauss_kronrod(f, lo, r_cut, opt)).value;
  };
  if (model.d == 1) {
    auto f = [&](double t) { return rho_radial(model, t); };
    out.value = 2.0 * beyond(f);
  } else {
    out.value = octant_integral([&](double R) { return radial_mass_outside(model, R); }, a, rel_tol);
  }
  out.log_ratio = out.value * std::log(a);
  return out;
}

LocalExponent local_exponent_closed_form(const CovarianceModel& model) {
  LocalExponent le;
  if (model.kind == CovarianceKind::powered_exponential) {
    le.alpha = model.alpha;
    le.C = std::pow(model.scale, -model.alpha);
  } else {
    le.alpha = 2.0;
    le.C = model.beta / (model.scale * model.scale);
  }
  le.fitted_slope = le.alpha;
  return le;
}

double radius_at_decorrelation(const CovarianceModel& model, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("radius_at_decorrelation: level must lie in (0, 1)");
  double lo = 0.0;
  double hi = model.scale;
  int guard = 0;
  while (one_minus_rho_radial(model, hi) < level) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw ConvergenceError("radius_at_decorrelation: no bracket found");
  }
  // Shrink from below when the crossing is far inside (small α or tiny levels).
  while (lo == 0.0 && one_minus_rho_radial(model, hi * 0.5) >= level && hi > 1e-300) hi *= 0.5;
  lo = hi * 0.5;
  if (one_minus_rho_radial(model, lo) >= level) lo = 0.0;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (one_minus_rho_radial(model, mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

LocalExponent local_exponent(const CovarianceModel& model) {
  LocalExponent le = local_exponent_closed_form(model);
  const double r_lo = radius_at_decorrelation(model, 1e-8);
  const double r_hi = radius_at_decorrelation(model, 1e-5);
  constexpr int kPoints = 25;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double w = static_cast<double>(i) / (kPoints - 1);
    const double x = std::log(r_lo) + w * (std::log(r_hi) - std::log(r_lo));
    const double y = std::log(one_minus_rho_radial(model, std::exp(x)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = kPoints;
  le.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (std::abs(le.fitted_slope - le.alpha) > 1e-3) {
    throw FitMismatchError("local_exponent: fitted slope " + std::to_string(le.fitted_slope) +
                           " disagrees with alpha " + std::to_string(le.alpha));
  }
  return le;
}

}  // namespace sojourn
