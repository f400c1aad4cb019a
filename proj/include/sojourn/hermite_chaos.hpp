#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <span>
#include <vector>

namespace sojourn {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Cramér's bound: |e^{-x²/4} H_n(x)| ≤ kCramer √(n!) for every real x and n ≥ 0.
inline constexpr double kCramer = 1.086435;

/// Probabilists' Hermite polynomial H_n(x) from H_{n+1} = x H_n - n H_{n-1}.
/// Overflows to ±inf for large n|x|; use hermite_scaled there.
double hermite(int n, double x);

/// e^{-x²/4} H_n(x) / √(n!).
///
/// Runs the normalized recurrence h_{m+1} = (x h_m - √m h_{m-1}) / √(m+1) and
/// keeps the Gaussian factor (and any rescaling) as a separate log scale, so the
/// result stays finite for n ≤ 10⁴, |x| ≤ 50.
double hermite_scaled(int n, double x);

/// out[m] = hermite_scaled(m, x) for m = 0 .. out.size() - 1.
void hermite_scaled_sequence(double x, std::span<double> out);

/// Weight of the level-u indicator on the n-th chaos: φ(u) H_{n-1}(u) / n!.
struct ChaosCoefficient {
  int n = 1;
  double u = 0.0;
  double value = 0.0;
};

/// Direct evaluation for n ≤ 30, log-domain beyond.
ChaosCoefficient chaos_coefficient(int n, double u);

/// E[H_n(X) H_n(Y)] = n! ρⁿ for standard Gaussians with correlation ρ.
double mehler_covariance(int n, double rho);

/// Σ_{n≥1} n! c_n(u)² ρⁿ for |ρ| < 1, truncated where the Cramér tail bound
/// drops below tol.
double chaos_covariance_series(double u, double rho, double tol = 1e-14,
                               int max_order = 1 << 22);

/// Σ_{n≥1} n! c_n(u)², which equals Φ̄(u)(1 - Φ̄(u)).
///
/// The series converges like N^{-1/2} at ρ = 1, so it is Abel-summed: the
/// ρ-series is evaluated at ρ = 1 - s² on a ladder of s and extrapolated to
/// s = 0 (the partial function is analytic in s). Throws ConvergenceError when
/// the extrapolation error estimate exceeds tol or an inner series needs more
/// than max_order terms.
double indicator_variance_series(double u, double tol, int max_order = 1 << 22);

struct InequalityCertificate {
  int p = 2;
  BigRational lhs;
  BigInt rhs;
  bool holds = false;
};

/// lhs = Σ_{r=0}^{p-2} C(p-1,r)² C(2p-2-2r, p-1-r), rhs = 9^{p-1}.
InequalityCertificate chaos_variance_inequality(int p);

/// Σ_{r=0}^{n-2} (r!)² C(n-1,r)⁴ (2n-2-2r)!, exactly.
BigInt malliavin_combinatorial_sum(int n);

BigInt binomial(int n, int k);
BigInt factorial(int n);
double log_of(const BigInt& v);

struct LogScaledValue {
  double value = 0.0;      // +inf when the value does not fit in a double
  double log_value = 0.0;  // always finite
  bool overflow = false;
};

/// (n⁴ / T^d) · malliavin_combinatorial_sum(n) · rho_l1³.
LogScaledValue malliavin_derivative_variance_bound(int n, double T, int d, double rho_l1);

struct En3Sample {
  int n = 0;
  double ratio = 0.0;  // max_x e^{-x²/4}|H_n(x)| / (√(n!) n^{-1/12})
  double argmax_x = 0.0;
};

struct HermiteBoundScan {
  double K_hat = 0.0;  // max φ(u)|H_n(u)|/√(n!) over the scan
  double K_argmax_u = 0.0;
  int K_argmax_n = 0;
  std::map<double, double> en1_constants;  // u ↦ max_n e^{-u²/4}|H_n(u)| (n/e)^{-n/2}
  std::vector<En3Sample> en3_ratio_trace;
};

/// max_{n ≤ n_max} e^{-u²/4}|H_n(u)|·(n/e)^{-n/2}, measured on a finite range of n.
double en1_constant(double u, int n_max);

/// Scans n = 0..n_max (n_max ≥ 100) on u_grid. The en3 trace uses the
/// schedule n_max, n_max/2, n_max/4, ... down to 10, in increasing order.
HermiteBoundScan hermite_bound_scan(std::span<const double> u_grid, int n_max);

/// One entry of the en3 trace; x is maximized over a grid resolving the
/// oscillations, then refined by golden-section search.
En3Sample en3_peak_ratio(int n);

}  // namespace sojourn
