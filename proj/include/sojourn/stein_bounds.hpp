#pragma once

#include "sojourn/covariance_models.hpp"

#include <string>
#include <vector>

namespace sojourn {

enum class BoundMode { fixed, moving };

std::string to_string(BoundMode mode);
BoundMode parse_bound_mode(const std::string& name);

struct NamedConstant {
  std::string name;
  double value = 0.0;
  std::string provenance;  // "measured", "closed-form" or "derived"
};

struct RateBound {
  double T = 0.0;
  double u = 0.0;
  BoundMode mode = BoundMode::fixed;
  int n_trunc = 0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double term_body = 0.0;
  double term_body_d1_form = 0.0;  // same with u^{(2+α)/α}, the d = 1 exponent
  double term_tail = 0.0;
  double total = 0.0;
  bool tail_non_vanishing = false;  // u² ≥ 2β log T
  std::vector<NamedConstant> constants_profile;

  double constant(const std::string& name) const;
};

/// max(2, round(log(T)/4)); T must exceed 1.
int truncation_fixed(double T);

/// max(2, round((d/2 - β) log T / log 3)); β ∈ (0, d/2).
int truncation_moving(double T, int d, double beta);

/// d1 + d2 + d3 with
///   d1 = K1 N^{-1/4},  d2 = K2 3^N / √(T^d),  d3 = K3 (N^{-1/4} + T^{-1/4} + (log T)^{-1/2}).
/// K1 = C_u √(φ(u)∫|ρ|) (√2/π)^{1/2}, with C_u = en1_constant(u);
/// K2 = (∫|ρ|)^{3/2} K² (1/4 + 2/(√3-1)²), with K = sup_{n ≤ 2000} φ(u)|H_n(u)|/√(n!);
/// K3 = √(2/π) max(K1, √(d V ∫|ρ|), √(2 c3 V)), V = Φ̄(u)(1-Φ̄(u)),
///      c3 = sup_a tail_l1(a) log a over a ∈ [1.5, 10⁴].
RateBound fixed_level_bound(const CovarianceModel& model, double u, double T);

/// C_β (term_body + term_tail) with
///   term_body = √(u^{1+2d/α} / (log T)^{1/6}),  term_tail = 1/(T^β φ(u) u),
///   C_β² = 6·2^{1/6} c_en3² ∫|ρ| / (2√(2π) I) · ((d/2-β)/log 3)^{-1/6},
/// where c_en3 is the en3 peak constant and I = berman_constant(model).
RateBound moving_level_bound(const CovarianceModel& model, double u_T, double T, double beta);

/// γ(2+α)/α < 1/6, with a 1e-12 band around 1/6 classified as false.
bool corollary_condition(double gamma, double alpha);

}  // namespace sojourn
