#pragma once

#include <cmath>
#include <numbers>

namespace sojourn {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
inline double log_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

/// Upper tail 1 - Φ(x), accurate far into both tails.
inline double normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Antiderivative of Φ: d/dx [xΦ(x) + φ(x)] = Φ(x).
inline double normal_cdf_antiderivative(double x) { return x * normal_cdf(x) + normal_pdf(x); }

double normal_quantile(double p);

}  // namespace sojourn
