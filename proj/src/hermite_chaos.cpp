#include "sojourn/hermite_chaos.hpp"

#include "sojourn/errors.hpp"
#include "sojourn/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sojourn {
namespace {

constexpr double kRescale = 1e150;
constexpr double kInvRescale = 1e-150;
const double kLogRescale = std::log(kRescale);

// Streams h_m = e^{-x²/4} H_m(x) / √(m!) for m = 0, 1, 2, ...
class ScaledHermiteStream {
 public:
  explicit ScaledHermiteStream(double x) : x_(x), log_scale_(-0.25 * x * x) { refresh_factor(); }

  int order() const { return m_; }

  double value() const {
    if (cur_ == 0.0) return 0.0;
    if (factor_ok_) return cur_ * factor_;
    return std::copysign(std::exp(std::log(std::abs(cur_)) + log_scale_), cur_);
  }

  void advance() {
    const double m = static_cast<double>(m_);
    const double next = (x_ * cur_ - std::sqrt(m) * prev_) / std::sqrt(m + 1.0);
    prev_ = cur_;
    cur_ = next;
    ++m_;
    if (std::abs(cur_) > kRescale) {
      cur_ *= kInvRescale;
      prev_ *= kInvRescale;
      log_scale_ += kLogRescale;
      refresh_factor();
    }
  }

 private:
  void refresh_factor() {
    factor_ = std::exp(log_scale_);
    factor_ok_ = std::isnormal(factor_);
  }

  double x_;
  double log_scale_;
  double prev_ = 0.0;
  double cur_ = 1.0;
  double factor_ = 1.0;
  bool factor_ok_ = true;
  int m_ = 0;
};

// Neville's scheme evaluated at 0.
double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys) {
  std::vector<double> p(ys.begin(), ys.end());
  const std::size_t n = xs.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i + k < n; ++i) {
      p[i] = (-xs[i + k] * p[i] + xs[i] * p[i + 1]) / (xs[i] - xs[i + k]);
    }
  }
  return p[0];
}

double lebesgue_at_zero(std::span<const double> xs) {
  double total = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double w = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i != j) w *= xs[i] / (xs[i] - xs[j]);
    }
    total += std::abs(w);
  }
  return total;
}

// h holds e^{-u²/4}H_m(u)/√(m!); rescale each by √(m!)(e/m)^{m/2}.
double en1_from_sequence(std::span<const double> h) {
  double en1 = 0.0;
  for (std::size_t m = 0; m < h.size(); ++m) {
    const double hm = std::abs(h[m]);
    if (hm == 0.0) continue;
    double log_c = std::log(hm);
    if (m > 0) {
      const double md = static_cast<double>(m);
      log_c += 0.5 * std::lgamma(md + 1.0) - 0.5 * md * (std::log(md) - 1.0);
    }
    en1 = std::max(en1, std::exp(log_c));
  }
  return en1;
}

}  // namespace

double hermite(int n, double x) {
  if (n < 0) throw DomainError("hermite: n must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int m = 1; m < n; ++m) {
    const double next = x * cur - m * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_scaled(int n, double x) {
  if (n < 0) throw DomainError("hermite_scaled: n must be >= 0");
  ScaledHermiteStream s(x);
  while (s.order() < n) s.advance();
  return s.value();
}

void hermite_scaled_sequence(double x, std::span<double> out) {
  ScaledHermiteStream s(x);
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = s.value();
    s.advance();
  }
}

ChaosCoefficient chaos_coefficient(int n, double u) {
  if (n < 1) throw DomainError("chaos_coefficient: n must be >= 1");
  ChaosCoefficient c{n, u, 0.0};
  if (n <= 30) {
    c.value = normal_pdf(u) * hermite(n - 1, u) / std::tgamma(n + 1.0);
    return c;
  }
  const double hs = hermite_scaled(n - 1, u);
  if (hs == 0.0) return c;
  const double log_abs = log_normal_pdf(u) + 0.25 * u * u + std::log(std::abs(hs)) +
                         0.5 * std::lgamma(static_cast<double>(n)) -
                         std::lgamma(n + 1.0);
  c.value = std::copysign(std::exp(log_abs), hs);
  return c;
}

double mehler_covariance(int n, double rho) {
  if (n < 1) throw DomainError("mehler_covariance: n must be >= 1");
  if (!(std::abs(rho) <= 1.0)) throw DomainError("mehler_covariance: |rho| must be <= 1");
  return std::tgamma(n + 1.0) * std::pow(rho, n);
}

double chaos_covariance_series(double u, double rho, double tol, int max_order) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("chaos_covariance_series: |rho| must be < 1");
  if (!(tol > 0.0)) throw DomainError("chaos_covariance_series: tol must be > 0");
  // n! c_n(u)² = φ(u)²H²_{n-1}(u)/n! = (e^{-u²/2}/2π) h²_{n-1}/n.
  const double pref = std::exp(-0.5 * u * u) / (2.0 * std::numbers::pi);
  if (pref == 0.0 || rho == 0.0) return 0.0;
  const double tail_scale = pref * kCramer * kCramer / (1.0 - std::abs(rho));
  ScaledHermiteStream h(u);
  double sum = 0.0;
  double power = 1.0;
  for (int n = 1; n <= max_order; ++n) {
    const double hv = h.value();
    power *= rho;
    sum += pref * hv * hv / n * power;
    if (tail_scale * std::abs(power * rho) / (n + 1.0) < tol) return sum;
    h.advance();
  }
  throw ConvergenceError("chaos_covariance_series: tail bound not below tol after " +
                         std::to_string(max_order) + " terms");
}

double indicator_variance_series(double u, double tol, int max_order) {
  if (!(tol > 0.0)) throw DomainError("indicator_variance_series: tol must be > 0");
  const double pref = std::exp(-0.5 * u * u) / (2.0 * std::numbers::pi);
  if (pref == 0.0) return 0.0;

  constexpr std::size_t kNodes = 12;
  constexpr double kStep = 0.04;
  std::array<double, kNodes> s{};
  std::array<double, kNodes> r{};
  std::array<double, kNodes> power{};
  std::array<double, kNodes> sum{};
  for (std::size_t k = 0; k < kNodes; ++k) {
    s[k] = kStep * static_cast<double>(k + 1);
    r[k] = 1.0 - s[k] * s[k];
    power[k] = 1.0;
  }
  const double lebesgue = lebesgue_at_zero(s);
  const double inner_tol = std::min(tol, pref) * 1e-6 / lebesgue;
  // r[0] is the slowest node, so its tail bound governs the stopping point.
  const double tail_scale = pref * kCramer * kCramer / (1.0 - r[0]);

  ScaledHermiteStream h(u);
  bool converged = false;
  for (int n = 1; n <= max_order; ++n) {
    const double hv = h.value();
    const double term = pref * hv * hv / n;
    for (std::size_t k = 0; k < kNodes; ++k) {
      power[k] *= r[k];
      sum[k] += term * power[k];
    }
    if (tail_scale * power[0] * r[0] / (n + 1.0) < inner_tol) {
      converged = true;
      break;
    }
    h.advance();
  }
  if (!converged) {
    throw ConvergenceError("indicator_variance_series: inner series exceeded max_order " +
                           std::to_string(max_order));
  }

  const double full = extrapolate_to_zero(s, sum);
  const double reduced = extrapolate_to_zero(std::span(s).first(kNodes - 1),
                                             std::span(sum).first(kNodes - 1));
  const double err = std::abs(full - reduced) + lebesgue * inner_tol;
  if (err > tol) {
    throw ConvergenceError("indicator_variance_series: extrapolation error estimate " +
                           std::to_string(err) + " exceeds tol at u = " + std::to_string(u));
  }
  return full;
}

BigInt factorial(int n) {
  if (n < 0) throw DomainError("factorial: n must be >= 0");
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

double log_of(const BigInt& v) {
  if (v <= 0) throw DomainError("log_of: argument must be positive");
  const auto bits = static_cast<long>(boost::multiprecision::msb(v));
  if (bits < 1000) return std::log(v.convert_to<double>());
  const BigInt top = v >> static_cast<unsigned>(bits - 60);
  return std::log(top.convert_to<double>()) + static_cast<double>(bits - 60) * std::numbers::ln2;
}

InequalityCertificate chaos_variance_inequality(int p) {
  if (p < 2) throw DomainError("chaos_variance_inequality: p must be >= 2");
  BigInt lhs = 0;
  for (int r = 0; r <= p - 2; ++r) {
    const BigInt c = binomial(p - 1, r);
    lhs += c * c * binomial(2 * p - 2 - 2 * r, p - 1 - r);
  }
  InequalityCertificate cert;
  cert.p = p;
  cert.lhs = BigRational(lhs);
  cert.rhs = boost::multiprecision::pow(BigInt(9), static_cast<unsigned>(p - 1));
  cert.holds = cert.lhs <= BigRational(cert.rhs);
  return cert;
}

BigInt malliavin_combinatorial_sum(int n) {
  if (n < 2) throw DomainError("malliavin_combinatorial_sum: n must be >= 2");
  BigInt total = 0;
  for (int r = 0; r <= n - 2; ++r) {
    const BigInt rf = factorial(r);
    const BigInt c = binomial(n - 1, r);
    const BigInt c2 = c * c;
    total += rf * rf * c2 * c2 * factorial(2 * n - 2 - 2 * r);
  }
  return total;
}

LogScaledValue malliavin_derivative_variance_bound(int n, double T, int d, double rho_l1) {
  if (n < 2) throw DomainError("malliavin_derivative_variance_bound: n must be >= 2");
  if (!(T > 0.0) || d < 1 || !(rho_l1 > 0.0)) {
    throw DomainError("malliavin_derivative_variance_bound: T, d and rho_l1 must be positive");
  }
  LogScaledValue out;
  out.log_value = 4.0 * std::log(static_cast<double>(n)) - d * std::log(T) +
                  log_of(malliavin_combinatorial_sum(n)) + 3.0 * std::log(rho_l1);
  out.value = std::exp(out.log_value);
  out.overflow = std::isinf(out.value);
  return out;
}

En3Sample en3_peak_ratio(int n) {
  if (n < 0) throw DomainError("en3_peak_ratio: n must be >= 0");
  // Plain recurrence with precomputed √m; the peak sits near the turning point
  // x ≈ 2√n where |h_n| is O(n^{-1/12}), so no rescaling is needed there, but
  // the log-scaled stream is used for safety when the grid runs past it.
  std::vector<double> sq(static_cast<std::size_t>(n) + 2);
  for (std::size_t m = 0; m < sq.size(); ++m) sq[m] = std::sqrt(static_cast<double>(m));
  auto magnitude = [&](double x) {
    double prev = 0.0;
    double cur = 1.0;
    double log_scale = -0.25 * x * x;
    for (int m = 0; m < n; ++m) {
      const double next = (x * cur - sq[m] * prev) / sq[m + 1];
      prev = cur;
      cur = next;
      if (std::abs(cur) > kRescale) {
        cur *= kInvRescale;
        prev *= kInvRescale;
        log_scale += kLogRescale;
      }
    }
    if (cur == 0.0) return 0.0;
    return std::exp(std::log(std::abs(cur)) + log_scale);
  };

  const double np1 = n + 1.0;
  const double x_hi = 2.0 * std::sqrt(np1) + 6.0 * std::pow(np1, -1.0 / 6.0) + 2.0;
  const double step = std::min(0.05, std::numbers::pi / (8.0 * std::sqrt(np1)));
  const auto points = static_cast<std::size_t>(std::ceil(x_hi / step)) + 1;

  struct Candidate {
    double x;
    double v;
  };
  std::vector<Candidate> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = step * static_cast<double>(i);
    grid[i] = {x, magnitude(x)};
  }
  std::vector<Candidate> local_max;
  for (std::size_t i = 0; i < points; ++i) {
    const double left = i > 0 ? grid[i - 1].v : -1.0;
    const double right = i + 1 < points ? grid[i + 1].v : -1.0;
    if (grid[i].v >= left && grid[i].v >= right) local_max.push_back(grid[i]);
  }
  std::sort(local_max.begin(), local_max.end(),
            [](const Candidate& a, const Candidate& b) { return a.v > b.v; });
  if (local_max.size() > 3) local_max.resize(3);

  Candidate best = local_max.front();
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (const Candidate& c : local_max) {
    double a = std::max(0.0, c.x - step);
    double b = c.x + step;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = magnitude(x1);
    double f2 = magnitude(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = magnitude(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = magnitude(x1);
      }
    }
    const Candidate refined = f1 > f2 ? Candidate{x1, f1} : Candidate{x2, f2};
    if (refined.v > best.v) best = refined;
  }
  return {n, best.v * std::pow(std::max(n, 1), 1.0 / 12.0), best.x};
}

double en1_constant(double u, int n_max) {
  if (n_max < 0) throw DomainError("en1_constant: n_max must be >= 0");
  std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
  hermite_scaled_sequence(u, h);
  return en1_from_sequence(h);
}

HermiteBoundScan hermite_bound_scan(std::span<const double> u_grid, int n_max) {
  if (n_max < 100) throw DomainError("hermite_bound_scan: n_max must be >= 100");
  if (u_grid.empty()) throw DomainError("hermite_bound_scan: u_grid is empty");

  HermiteBoundScan scan;
  scan.K_hat = -1.0;
  std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
  for (const double u : u_grid) {
    hermite_scaled_sequence(u, h);
    const double k_scale = std::exp(-0.25 * u * u) * kInvSqrt2Pi;
    for (int m = 0; m <= n_max; ++m) {
      const double k = k_scale * std::abs(h[static_cast<std::size_t>(m)]);
      if (k > scan.K_hat) {
        scan.K_hat = k;
        scan.K_argmax_u = u;
        scan.K_argmax_n = m;
      }
    }
    scan.en1_constants[u] = en1_from_sequence(h);
  }

  std::vector<int> schedule;
  for (int n = n_max; n >= 10; n /= 2) schedule.push_back(n);
  std::reverse(schedule.begin(), schedule.end());
  for (const int n : schedule) scan.en3_ratio_trace.push_back(en3_peak_ratio(n));
  return scan;
}

}  // namespace sojourn
