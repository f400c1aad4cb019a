#pragma once

#include "sojourn/covariance_models.hpp"

namespace sojourn {

/// φ(u,u,y): density of a standard bivariate normal pair with correlation y,
/// evaluated on the diagonal (u,u). Requires |y| < 1.
double bivariate_density(double u, double y);

/// ∫_0^ρ φ(u,u,y) dy = Cov(1{X ≥ u}, 1{Y ≥ u}) for corr(X,Y) = ρ.
///
/// Evaluated after y = sin θ, which removes the 1/√(1-y²) endpoint singularity:
///   (1/2π) ∫_0^{asin ρ} exp(-u²/(1 + sin θ)) dθ.
double covariance_of_indicators(double u, double rho, double rel_tol = 1e-12);

struct SigmaSquaredDetail {
  double value = 0.0;     // series value, returned by sigma_squared
  double integral = 0.0;  // ∫_{R^d} covariance_of_indicators(u, ρ(t)) dt
  double tail_bound = 0.0;
  double en1_constant = 0.0;  // C_u used by the tail majorant
  int terms = 0;
};

/// Σ_{n≥1} φ(u)²H²_{n-1}(u)/n! · ∫ρⁿ, the limiting variance of T^{-d/2}(S_T - E S_T).
///
/// Truncated once the majorant
///   (e^{-u²/2}/2π) C_u² (2π)^{-1/2} ∫ρ^{N+1} · 2/√(N-1)
/// drops below tol, with C_u = en1_constant(u); then compared with
/// the radial integral of covariance_of_indicators. Throws CrossValidationError
/// if they differ by more than 10·tol, ConvergenceError if max_order is hit.
SigmaSquaredDetail sigma_squared_detail(const CovarianceModel& model, double u, double tol = 1e-8,
                                        int max_order = 1 << 27);
double sigma_squared(const CovarianceModel& model, double u, double tol = 1e-8);

/// Var(S_T) = ∫_{[-T,T]^d} Π_j(T - |t_j|) ∫_0^{ρ(t)} φ(u,u,y) dy dt.
/// d = 2 is integrated in polar form over the octant.
double var_sojourn_exact(const CovarianceModel& model, double T, double u, double rel_tol = 1e-8);

/// Half-width of the largest centered cube with 1 - ρ < level on it.
double localization_eps(const CovarianceModel& model, double level = 0.5);

/// B_numeric(u) = ∫_{[-eps,eps]^d} ∫_0^{ρ(t)} φ(u,u,y) dy dt.
double localized_variance(const CovarianceModel& model, double u, double eps,
                          double rel_tol = 1e-10);

/// Weighted variance integral over [-T,T]^d \ [-eps,eps]^d divided by the one over
/// [-eps,eps]^d. +inf if the denominator underflows.
double berman_localization_ratio(const CovarianceModel& model, double u, double T, double eps);

/// ∫_{R^d} Φ̄(√(C‖z‖^α/2)) dz for the model's local exponent (α, C). Radial
/// quadrature, computed once per (α, C, d) and cached.
double berman_constant(const CovarianceModel& model);

/// 2 φ(u) u^{-(1+2d/α)} · berman_constant(model).
double berman_B_asymptotic(const CovarianceModel& model, double u);

/// B_numeric(u)·exp(u²θ/2) at the default localization eps. θ must exceed 1.
double berman_lower_bound_audit(const CovarianceModel& model, double u, double theta);

struct BermanBounds {
  double upper = 0.0;
  double lower = 0.0;
  double eps = 0.0;  // 1 - ρ < δ on [-eps, eps]^d
};

BermanBounds berman_two_sided_bounds(const CovarianceModel& model, double u, double delta);

struct VarianceBreakdown {
  double T = 0.0;
  double u = 0.0;
  double exact = 0.0;
  double series_sigma2 = 0.0;  // NaN unless requested
  double asymptotic = 0.0;     // T^d · B_asym(u)
  double ratio = 0.0;          // exact / asymptotic
};

VarianceBreakdown variance_breakdown(const CovarianceModel& model, double T, double u,
                                     bool with_series);

}  // namespace sojourn
