#pragma once

#include <span>
#include <string>
#include <string_view>

namespace sojourn {

enum class CovarianceKind { powered_exponential, cauchy };

std::string to_string(CovarianceKind kind);
CovarianceKind parse_covariance_kind(std::string_view name);

/// Isotropic stationary covariance with unit variance.
///
///   powered_exponential: ρ(t) = exp(-(‖t‖/scale)^α), α ∈ (0, 2]
///   cauchy:              ρ(t) = (1 + ‖t‖²/scale²)^{-β}, β > 0
///
/// Both families are positive definite in every dimension; only d ∈ {1, 2}
/// is supported. Integrability (∫|ρ| < ∞) additionally needs β > d/2 for
/// the Cauchy family and is checked where it matters.
struct CovarianceModel {
  CovarianceKind kind = CovarianceKind::powered_exponential;
  double alpha = 1.0;
  double beta = 1.0;
  double scale = 1.0;
  int d = 1;

  static CovarianceModel powered_exponential(double alpha, double scale = 1.0, int d = 1);
  static CovarianceModel cauchy(double beta, double scale = 1.0, int d = 1);

  /// Throws DomainError on out-of-range parameters.
  void validate() const;
  bool integrable() const;
  std::string describe() const;

  bool operator==(const CovarianceModel&) const = default;
};

/// ρ at distance r = ‖t‖.
double rho_radial(const CovarianceModel& model, double r);

/// 1 - ρ(r), without cancellation for small r.
double one_minus_rho_radial(const CovarianceModel& model, double r);

/// ρ(t) for t ∈ R^d; t.size() must equal model.d.
double rho(const CovarianceModel& model, std::span<const double> t);

/// ∫_{R^d} |ρ(t)| dt (closed form). Throws DivergenceError when infinite.
double l1_norm(const CovarianceModel& model);

/// Same quantity by radial quadrature; used as a cross-check.
double l1_norm_quadrature(const CovarianceModel& model, double rel_tol = 1e-10);

/// ∫_{R^d} ρ(t)^n dt. Both families are closed under powers (ρⁿ is the same
/// family with scale·n^{-1/α}, resp. β·n), so this is closed form; n may be
/// any real ≥ 1.
double rho_power_integral(const CovarianceModel& model, double n);

double rho_power_integral_quadrature(const CovarianceModel& model, int n,
                                     double rel_tol = 1e-10);

struct TailL1 {
  double value = 0.0;      // ∫_{R^d \ [-a,a]^d} |ρ|
  double log_ratio = 0.0;  // value · log(a), should stay bounded as a grows
};

TailL1 tail_l1(const CovarianceModel& model, double a, double rel_tol = 1e-10);

/// ∫_{[-a,a]^d} |ρ| by quadrature.
double box_l1(const CovarianceModel& model, double a, double rel_tol = 1e-10);

struct LocalExponent {
  double alpha = 0.0;  // 1 - ρ(t) ≅ C ‖t‖^α as t → 0
  double C = 0.0;
  double fitted_slope = 0.0;
};

LocalExponent local_exponent_closed_form(const CovarianceModel& model);

/// Closed form, confirmed by a log-log regression of 1 - ρ on ‖t‖ over the
/// range where 1 - ρ ∈ [1e-8, 1e-5]. Throws FitMismatchError when the fitted
/// slope is off by more than 1e-3.
LocalExponent local_exponent(const CovarianceModel& model);

/// Smallest r with 1 - ρ(r) = level, by bisection. level ∈ (0, 1).
double radius_at_decorrelation(const CovarianceModel& model, double level);

}  // namespace sojourn
