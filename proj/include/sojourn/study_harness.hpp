#pragma once

#include "sojourn/covariance_models.hpp"
#include "sojourn/field_sampler.hpp"
#include "sojourn/stein_bounds.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sojourn {

/// h^d times the number of grid points with value ≥ u, over the left-endpoint
/// cells (the last point of each axis only closes a cell).
double sojourn_time(const FieldSample& field, double u);
double sojourn_time(std::span<const double> values, const GridSpec& grid, double u);

struct SojournStatistic {
  double T = 0.0;
  double u = 0.0;
  double raw = 0.0;
  double centered_normalized = 0.0;
};

struct TheoryContext {
  double tail = 0.5;            // Φ̄(u)
  double var_exact = 0.0;       // Var(S_T), moving mode only
};

/// fixed:  (raw - T^dΦ̄(u)) / √(T^d)
/// moving: (raw - T^dΦ̄(u)) / √(Var S_T)
SojournStatistic normalize(double raw, double T, int d, double u, BoundMode mode,
                           const TheoryContext& ctx);

/// ∫|F_n(x) - Φ(x/σ)| dx in closed form per segment between order statistics.
double wasserstein1_to_gaussian(std::span<const double> samples, double sigma);

struct LevelSchedule {
  double c = 1.0;
  double gamma = 0.0;
  double at(double T) const;  // c (log T)^γ
};

struct ExperimentConfig {
  CovarianceModel model;
  std::vector<double> T_ladder;
  std::optional<double> h;  // default: 1 - ρ(h) = 0.01
  BoundMode mode = BoundMode::fixed;
  double u = 0.0;
  LevelSchedule u_schedule;
  double beta = 0.25;
  std::uint64_t replicates = 1000;
  std::uint64_t master_seed = 42;
  int workers = 1;

  void validate() const;
  double spacing() const;
};

/// Grid spacing with 1 - ρ(h) = 0.01.
double default_spacing(const CovarianceModel& model);

struct ConvergenceRow {
  double T = 0.0;  // grid edge h(n-1)
  double u_eff = 0.0;
  std::uint64_t R = 0;
  double h = 0.0;
  double W1_emp = 0.0;          // Monte Carlo + discretization
  double W1_half_spread = 0.0;  // |W1(first half) - W1(second half)|
  double sigma2_or_var = 0.0;   // σ² (fixed) or Var S_T (moving)
  double emp_var_normalized = 0.0;
  double mean_raw = 0.0;
  double mean_expected = 0.0;
  double mean_se = 0.0;
  bool mean_within_3se = false;
  int n_trunc = 0;
  double bound_total = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double term_body = 0.0;
  double term_body_d1_form = 0.0;
  double term_tail = 0.0;
  double var_ratio = 0.0;  // moving: Var S_T / (T^d B_asym(u))
  bool corollary_holds = true;
  bool tail_non_vanishing = false;
  std::string status = "ok";

  bool operator==(const ConvergenceRow&) const = default;
};

struct ConvergenceReport {
  BoundMode mode = BoundMode::fixed;
  std::string model;
  std::vector<ConvergenceRow> rows;

  bool operator==(const ConvergenceReport&) const = default;
};

/// Worker count actually used: max(1, requested), capped by SOJOURN_WORKERS when set.
int effective_workers(int requested);

/// raw[i] = sojourn_time of replicate i; each worker takes indices w, w+W, ...
std::vector<double> simulate_sojourn_times(const FieldSampler& sampler, double u,
                                           std::uint64_t master_seed, std::uint64_t replicates,
                                           int workers);

ConvergenceReport run_fixed_level_study(const ExperimentConfig& config);
ConvergenceReport run_moving_level_study(const ExperimentConfig& config);
ConvergenceReport run_study(const ExperimentConfig& config);

enum class ReportFormat { csv, svg };

void emit_report(const ConvergenceReport& report, const std::string& path, ReportFormat format);
std::string report_to_csv(const ConvergenceReport& report);
ConvergenceReport report_from_csv(const std::string& text);
std::string report_to_svg(const ConvergenceReport& report);

/// RFC-4180 records; quoted fields may contain commas, quotes and line breaks.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

}  // namespace sojourn
