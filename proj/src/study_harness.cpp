#include "sojourn/study_harness.hpp"

#include "sojourn/errors.hpp"
#include "sojourn/gaussian.hpp"
#include "sojourn/variance_theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace sojourn {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  for (const double x : xs) m.mean += x;
  m.mean /= n;
  for (const double x : xs) m.var += (x - m.mean) * (x - m.mean);
  m.var /= n - 1.0;
  return m;
}

// ∫_a^b (Φ(x/σ) - p) dx.
double cdf_excess(double a, double b, double p, double sigma) {
  return sigma * (normal_cdf_antiderivative(b / sigma) - normal_cdf_antiderivative(a / sigma)) -
         p * (b - a);
}

}  // namespace

double sojourn_time(std::span<const double> values, const GridSpec& grid, double u) {
  if (values.size() != grid.total_points()) throw GridMismatchError("sojourn_time: value count mismatch");
  const std::size_t n = grid.n;
  std::size_t count = 0;
  if (grid.d == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) count += values[i] >= u;
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = 0; j + 1 < n; ++j) count += values[i * n + j] >= u;
    }
  }
  return std::pow(grid.h, grid.d) * static_cast<double>(count);
}

double sojourn_time(const FieldSample& field, double u) {
  return sojourn_time(field.values, field.grid, u);
}

SojournStatistic normalize(double raw, double T, int d, double u, BoundMode mode,
                           const TheoryContext& ctx) {
  SojournStatistic s;
  s.T = T;
  s.u = u;
  s.raw = raw;
  const double volume = std::pow(T, d);
  const double centered = raw - volume * ctx.tail;
  if (mode == BoundMode::fixed) {
    s.centered_normalized = centered / std::sqrt(volume);
  } else {
    if (!(ctx.var_exact >= 1e-300)) throw DomainError("normalize: variance is zero");
    s.centered_normalized = centered / std::sqrt(ctx.var_exact);
  }
  return s;
}

double wasserstein1_to_gaussian(std::span<const double> samples, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("wasserstein1_to_gaussian: sigma must be > 0");
  if (samples.size() < 2) throw DomainError("wasserstein1_to_gaussian: need at least 2 samples");
  std::vector<double> x(samples.begin(), samples.end());
  for (const double v : x) {
    if (!std::isfinite(v)) throw DomainError("wasserstein1_to_gaussian: non-finite sample");
  }
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const double nd = static_cast<double>(n);

  double total = sigma * normal_cdf_antiderivative(x.front() / sigma);
  total += sigma * normal_cdf_antiderivative(-x.back() / sigma);
  for (std::size_t i = 1; i < n; ++i) {
    const double a = x[i - 1];
    const double b = x[i];
    if (b == a) continue;
    const double p = static_cast<double>(i) / nd;
    const double c = sigma * normal_quantile(p);
    if (c <= a) {
      total += cdf_excess(a, b, p, sigma);
    } else if (c >= b) {
      total -= cdf_excess(a, b, p, sigma);
    } else {
      total += -cdf_excess(a, c, p, sigma) + cdf_excess(c, b, p, sigma);
    }
  }
  return total;
}

double LevelSchedule::at(double T) const { return c * std::pow(std::log(T), gamma); }

double default_spacing(const CovarianceModel& model) {
  return radius_at_decorrelation(model, 0.01);
}

void ExperimentConfig::validate() const {
  model.validate();
  if (T_ladder.empty()) throw ConfigError("T_ladder is empty");
  for (std::size_t i = 0; i < T_ladder.size(); ++i) {
    if (!(T_ladder[i] > 1.0)) throw ConfigError("T_ladder entries must exceed 1");
    if (i > 0 && !(T_ladder[i] > T_ladder[i - 1])) throw ConfigError("T_ladder must be strictly increasing");
  }
  if (replicates < 100) throw ConfigError("replicates must be >= 100");
  if (h && !(*h > 0.0)) throw ConfigError("grid.h must be > 0");
  if (mode == BoundMode::moving && !(beta > 0.0 && beta < 0.5 * model.d)) {
    throw ConfigError("beta must lie in (0, d/2)");
  }
  if (mode == BoundMode::moving && !(u_schedule.c > 0.0)) throw ConfigError("u_schedule.c must be > 0");
}

double ExperimentConfig::spacing() const { return h ? *h : default_spacing(model); }

int effective_workers(int requested) {
  int w = std::max(1, requested);
  if (const char* env = std::getenv("SOJOURN_WORKERS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) w = std::min<long>(w, cap);
  }
  return w;
}

std::vector<double> simulate_sojourn_times(const FieldSampler& sampler, double u,
                                           std::uint64_t master_seed, std::uint64_t replicates,
                                           int workers) {
  std::vector<double> raw(replicates);
  const int w = static_cast<int>(std::min<std::uint64_t>(effective_workers(workers), std::max<std::uint64_t>(replicates, 1)));
  auto work = [&](int id) {
    std::vector<double> field(sampler.grid().total_points());
    for (std::uint64_t r = static_cast<std::uint64_t>(id); r < replicates; r += static_cast<std::uint64_t>(w)) {
      sampler.sample_into(master_seed, r, field);
      raw[r] = sojourn_time(field, sampler.grid(), u);
    }
  };
  if (w == 1) {
    work(0);
    return raw;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
  for (int id = 0; id < w; ++id) {
    threads.emplace_back([&, id] {
      try {
        work(id);
      } catch (...) {
        errors[static_cast<std::size_t>(id)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return raw;
}

namespace {

// Shared per-row simulation: raw sojourn times, normalization, W1 and the mean audit.
void fill_empirical(ConvergenceRow& row, const ExperimentConfig& config, const FieldSampler& sampler,
                    BoundMode mode, const TheoryContext& ctx, double sigma) {
  const int d = config.model.d;
  const std::vector<double> raw =
      simulate_sojourn_times(sampler, row.u_eff, config.master_seed, config.replicates, config.workers);
  std::vector<double> z(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    z[i] = normalize(raw[i], row.T, d, row.u_eff, mode, ctx).centered_normalized;
  }
  row.W1_emp = wasserstein1_to_gaussian(z, sigma);
  const std::size_t half = z.size() / 2;
  row.W1_half_spread = std::abs(wasserstein1_to_gaussian(std::span(z).first(half), sigma) -
                                wasserstein1_to_gaussian(std::span(z).subspan(half), sigma));
  row.emp_var_normalized = moments(z).var;
  const Moments m = moments(raw);
  row.mean_raw = m.mean;
  row.mean_expected = std::pow(row.T, d) * ctx.tail;
  row.mean_se = std::sqrt(m.var / static_cast<double>(raw.size()));
  row.mean_within_3se = std::abs(row.mean_raw - row.mean_expected) <= 3.0 * row.mean_se;
  if (!row.mean_within_3se) {
    row.status = row.status == "ok" ? "mean_check_failed" : row.status + ";mean_check_failed";
  }
}

}  // namespace

ConvergenceReport run_fixed_level_study(const ExperimentConfig& config) {
  if (config.mode != BoundMode::fixed) throw ConfigError("run_fixed_level_study: mode must be fixed");
  config.validate();
  ConvergenceReport report;
  report.mode = BoundMode::fixed;
  report.model = config.model.describe();
  const double h = config.spacing();
  const double s2 = sigma_squared(config.model, config.u);
  for (const double T : config.T_ladder) {
    ConvergenceRow row;
    row.R = config.replicates;
    row.h = h;
    row.u_eff = config.u;
    row.sigma2_or_var = s2;
    try {
      const GridSpec grid = GridSpec::make(config.model.d, T, h);
      row.T = grid.T_grid();
      const RateBound b = fixed_level_bound(config.model, config.u, row.T);
      row.n_trunc = b.n_trunc;
      row.bound_total = b.total;
      row.d1 = b.d1;
      row.d2 = b.d2;
      row.d3 = b.d3;
      const FieldSampler sampler(config.model, grid);
      TheoryContext ctx;
      ctx.tail = normal_tail(config.u);
      fill_empirical(row, config, sampler, BoundMode::fixed, ctx, std::sqrt(s2));
    } catch (const Error& e) {
      row.status = std::string("error: ") + e.what();
    }
    report.rows.push_back(row);
  }
  return report;
}

ConvergenceReport run_moving_level_study(const ExperimentConfig& config) {
  if (config.mode != BoundMode::moving) throw ConfigError("run_moving_level_study: mode must be moving");
  config.validate();
  ConvergenceReport report;
  report.mode = BoundMode::moving;
  report.model = config.model.describe();
  const double h = config.spacing();
  const double alpha = local_exponent_closed_form(config.model).alpha;
  const bool corollary = corollary_condition(config.u_schedule.gamma, alpha);
  for (const double T : config.T_ladder) {
    ConvergenceRow row;
    row.R = config.replicates;
    row.h = h;
    row.corollary_holds = corollary;
    if (!corollary) row.status = "corollary_condition_false";
    try {
      const GridSpec grid = GridSpec::make(config.model.d, T, h);
      row.T = grid.T_grid();
      row.u_eff = config.u_schedule.at(row.T);
      TheoryContext ctx;
      ctx.tail = normal_tail(row.u_eff);
      ctx.var_exact = var_sojourn_exact(config.model, row.T, row.u_eff);
      row.sigma2_or_var = ctx.var_exact;
      row.var_ratio = ctx.var_exact / (std::pow(row.T, config.model.d) *
                                       berman_B_asymptotic(config.model, row.u_eff));
      const RateBound b = moving_level_bound(config.model, row.u_eff, row.T, config.beta);
      row.n_trunc = b.n_trunc;
      row.bound_total = b.total;
      row.term_body = b.term_body;
      row.term_body_d1_form = b.term_body_d1_form;
      row.term_tail = b.term_tail;
      row.tail_non_vanishing = b.tail_non_vanishing;
      const FieldSampler sampler(config.model, grid);
      fill_empirical(row, config, sampler, BoundMode::moving, ctx, 1.0);
    } catch (const Error& e) {
      row.status = std::string("error: ") + e.what();
    }
    report.rows.push_back(row);
  }
  return report;
}

ConvergenceReport run_study(const ExperimentConfig& config) {
  return config.mode == BoundMode::fixed ? run_fixed_level_study(config) : run_moving_level_study(config);
}

}  // namespace sojourn
