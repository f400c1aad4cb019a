// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "sojourn/covariance_models.hpp"
#include "sojourn/field_sampler.hpp"
#include "sojourn/gaussian.hpp"
#include "sojourn/hermite_chaos.hpp"
#include "sojourn/study_harness.hpp"
#include "sojourn/variance_theory.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace sojourn;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed >= time_limit_s) {
    out.pass = false;
    out.detail << " [over time budget of " << time_limit_s << " s]";
  }
  if (!out.pass) ++failures;
  std::printf("%s criterion %2d: %s (%.2f s)%s\n", out.pass ? "PASS" : "FAIL", id, title, elapsed,
              out.detail.str().c_str());
  std::fflush(stdout);
}

ExperimentConfig fixed_level_config(int workers) {
  ExperimentConfig c;
  c.model = CovarianceModel::powered_exponential(1.0);
  c.mode = BoundMode::fixed;
  c.T_ladder = {25.0, 100.0, 400.0};
  c.h = 0.1;
  c.u = 0.0;
  c.replicates = 4000;
  c.master_seed = 42;
  c.workers = workers;
  return c;
}

}  // namespace

int main() {
  criterion(1, "indicator variance series equals tail product", 1.0, [](Outcome& o) {
    double worst = 0.0;
    for (double u : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      const double t = normal_tail(u);
      worst = std::max(worst, std::abs(indicator_variance_series(u, 1e-8) - t * (1.0 - t)));
    }
    o.detail << " max error " << worst;
    o.require(worst <= 1e-8, "error above 1e-8");
  });

  criterion(2, "chaos series matches bivariate-density integral on 3x3 grid", 5.0, [](Outcome& o) {
    double worst = 0.0;
    for (double u : {0.0, 1.0, 2.0}) {
      for (double rho : {0.1, 0.5, 0.9}) {
        worst = std::max(worst, std::abs(chaos_covariance_series(u, rho) - covariance_of_indicators(u, rho)));
      }
    }
    o.detail << " max difference " << worst;
    o.require(worst <= 1e-8, "difference above 1e-8");
  });

  criterion(3, "limiting variance of exponential kernel at level 0 is ln(2)/2", 5.0, [](Outcome& o) {
    const auto d = sigma_squared_detail(CovarianceModel::powered_exponential(1.0), 0.0, 1e-8);
    const double want = std::log(2.0) / 2.0;
    o.detail << " series " << d.value << " integral " << d.integral;
    o.require(std::abs(d.value - want) <= 1e-6, "series route off by more than 1e-6");
    o.require(std::abs(d.integral - want) <= 1e-6, "integral route off by more than 1e-6");
  });

  criterion(4, "exact 9^(p-1) certificate for p = 2..50", 1.0, [](Outcome& o) {
    int held = 0;
    for (int p = 2; p <= 50; ++p) held += chaos_variance_inequality(p).holds;
    const auto c2 = chaos_variance_inequality(2);
    const auto c3 = chaos_variance_inequality(3);
    o.detail << " holds for " << held << "/49, lhs(2)=" << c2.lhs.str() << " lhs(3)=" << c3.lhs.str();
    o.require(held == 49, "certificate fails for some p");
    o.require(c2.lhs == BigRational(2) && c3.lhs == BigRational(14), "lhs values");
  });

  criterion(5, "circulant sampler exactness and Monte Carlo lag covariance", 60.0, [](Outcome& o) {
    const auto model = CovarianceModel::powered_exponential(1.0);
    const auto small = GridSpec::make(1, 6.3, 0.1);
    const FieldSampler sampler(model, small);
    const auto implied = sampler.implied_covariance();
    const std::size_t p = small.n;
    Eigen::MatrixXd sigma(p, p);
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        sigma(a, b) = rho_radial(model, small.h * std::abs(static_cast<double>(a) - static_cast<double>(b)));
      }
    }
    const Eigen::MatrixXd L = sigma.llt().matrixL();
    const Eigen::MatrixXd dense = L * L.transpose();
    double worst = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) worst = std::max(worst, std::abs(implied[a * p + b] - dense(a, b)));
    }
    o.detail << " n=" << p << " max entry error " << worst;
    o.require(p <= 64 && worst <= 1e-12, "implied covariance differs from dense oracle");

    const auto grid = GridSpec::make(1, 10.0, 0.1);
    std::vector<FieldSample> samples;
    for (std::uint64_t r = 0; r < 500; ++r) samples.push_back(sample_field(model, grid, 42, r));
    for (int steps : {0, 5, 10}) {
      const std::array<int, 1> lag{steps};
      const auto est = empirical_covariance(samples, lag);
      const double want = rho_radial(model, 0.1 * steps);
      const double z = (est.estimate - want) / est.standard_error;
      o.detail << "; lag " << 0.1 * steps << ": " << est.estimate << " (z=" << z << ")";
      o.require(std::abs(z) <= 3.0, "lag covariance outside 3 SE");
    }
  });

  ConvergenceReport fixed_report;
  criterion(6, "fixed-level CLT distance shrinks on T = 25, 100, 400", 600.0, [&](Outcome& o) {
    fixed_report = run_study(fixed_level_config(1));
    const auto& rows = fixed_report.rows;
    for (const auto& r : rows) {
      o.detail << " T=" << r.T << ": W1=" << r.W1_emp << " (half-spread " << r.W1_half_spread
               << ", bound " << r.bound_total << ", bound*(log T)^(1/4)="
               << r.bound_total * std::pow(std::log(r.T), 0.25) << ", W1<=bound " << (r.W1_emp <= r.bound_total ? "yes" : "no")
               << ");";
      o.require(r.status == "ok", "row status " + r.status);
    }
    o.require(rows.size() == 3, "row count");
    if (rows.size() == 3) {
      o.require(rows[0].W1_emp > rows[1].W1_emp && rows[1].W1_emp > rows[2].W1_emp, "W1 not strictly decreasing");
      o.require(rows[2].W1_emp < 0.05, "W1 at T=400 not below 0.05");
      o.require(std::abs(rows[0].sigma2_or_var - std::log(2.0) / 2.0) < 1e-6, "target variance");
    }
    const auto rerun = run_study(fixed_level_config(1));
    o.require(rerun == fixed_report, "rerun differs");
  });

  criterion(7, "exact vs asymptotic sojourn variance at u=4, T=200", 120.0, [](Outcome& o) {
    for (double alpha : {1.0, 2.0}) {
      const auto m = CovarianceModel::powered_exponential(alpha);
      const double ratio = var_sojourn_exact(m, 200.0, 4.0) / (200.0 * berman_B_asymptotic(m, 4.0));
      o.detail << " alpha=" << alpha << ": " << ratio;
      o.require(ratio >= 0.85 && ratio <= 1.15, "ratio outside [0.85, 1.15]");
    }
  });

  criterion(8, "two-sided localization bounds at u=5", 120.0, [](Outcome& o) {
    const auto m = CovarianceModel::powered_exponential(1.0);
    const auto b = berman_two_sided_bounds(m, 5.0, 0.2);
    const double numeric = localized_variance(m, 5.0, b.eps);
    o.detail << " delta=0.2: lower " << b.lower << " numeric " << numeric << " upper " << b.upper << "; ratios";
    o.require(0.9 * b.lower <= numeric && numeric <= 1.1 * b.upper, "numeric value outside slack sandwich");
    double prev = INFINITY;
    for (double delta : {0.5, 0.2, 0.05}) {
      const auto bd = berman_two_sided_bounds(m, 5.0, delta);
      const double r = bd.upper / bd.lower;
      o.detail << ' ' << r;
      o.require(r < prev && r >= 1.0, "upper/lower not decreasing toward 1");
      prev = r;
    }
  });

  criterion(9, "Hermite bound audits", 60.0, [](Outcome& o) {
    const std::vector<double> grid{0.0};
    const auto scan = hermite_bound_scan(grid, 2000);
    o.detail << " K_hat " << scan.K_hat << " at n=" << scan.K_argmax_n;
    o.require(std::abs(scan.K_hat - 0.3989) <= 1e-4 && scan.K_argmax_n == 0, "K_hat");
    double lo = INFINITY, hi = 0.0;
    for (const auto& s : scan.en3_ratio_trace) {
      if (s.n >= 500 && s.n <= 2000) {
        lo = std::min(lo, s.ratio);
        hi = std::max(hi, s.ratio);
      }
    }
    o.detail << "; en3 trace range on [500, 2000]: " << lo << " .. " << hi;
    o.require(hi / lo - 1.0 < 0.05, "en3 trace varies by 5% or more");
  });

  criterion(10, "fixed-level report identical for 1, 4 and 8 workers", 1200.0, [&](Outcome& o) {
    const auto reference = fixed_report.rows.empty() ? run_study(fixed_level_config(1)) : fixed_report;
    const std::string csv = report_to_csv(reference);
    for (int w : {4, 8}) {
      const auto r = run_study(fixed_level_config(w));
      o.require(r == reference && report_to_csv(r) == csv, "differs with " + std::to_string(w) + " workers");
    }
    o.detail << " compared " << reference.rows.size() << " rows";
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
