#include "sojourn/config.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/gaussian.hpp"
#include "sojourn/study_harness.hpp"
#include "sojourn/variance_theory.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sojourn;

namespace {

const CovarianceModel kExp = CovarianceModel::powered_exponential(1.0);

std::vector<double> quantile_samples(std::size_t n, double sigma) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = sigma * normal_quantile((i + 0.5) / static_cast<double>(n));
  return x;
}

ConvergenceReport sample_report() {
  ConvergenceReport r;
  r.mode = BoundMode::moving;
  r.model = "cauchy(beta=1, scale=1, d=1)";
  for (double T : {10.0, 100.0 / 3.0, 1000.0}) {
    ConvergenceRow row;
    row.T = T;
    row.u_eff = std::sqrt(2.0) * std::log(T);
    row.R = 4000;
    row.h = 0.1;
    row.W1_emp = 1.0 / std::sqrt(T);
    row.W1_half_spread = 1e-3 / 7.0;
    row.sigma2_or_var = std::exp(-T / 100.0);
    row.emp_var_normalized = 0.987654321012345678;
    row.mean_raw = 1.0 / 3.0;
    row.mean_expected = 2.0 / 3.0;
    row.mean_se = 5e-320;
    row.mean_within_3se = T > 50;
    row.n_trunc = 7;
    row.bound_total = 2.0 / std::log(T);
    row.d1 = std::nextafter(1.0, 2.0);
    row.var_ratio = std::numeric_limits<double>::quiet_NaN();
    row.corollary_holds = false;
    row.status = T > 50 ? "ok" : "error: quoted \"x\", with comma\nand newline";
    r.rows.push_back(row);
  }
  return r;
}

bool same_row(const ConvergenceRow& a, const ConvergenceRow& b) {
  // NaN never compares equal; everything else must match bit for bit.
  ConvergenceRow x = a, y = b;
  if (std::isnan(x.var_ratio) && std::isnan(y.var_ratio)) x.var_ratio = y.var_ratio = 0.0;
  return x == y;
}

}  // namespace

TEST(SojournTime, ExtremeLevels) {
  for (int d : {1, 2}) {
    const auto g = GridSpec::make(d, 3.0, 0.25);
    const std::vector<double> values(g.total_points(), 0.3);
    EXPECT_DOUBLE_EQ(sojourn_time(values, g, -1e9), std::pow(g.T_grid(), d));
    EXPECT_EQ(sojourn_time(values, g, 1e9), 0.0);
  }
  const auto g = GridSpec::make(1, 1.0, 0.5);
  const std::vector<double> v{1.0, -1.0, 5.0};  // last point only closes a cell
  EXPECT_DOUBLE_EQ(sojourn_time(v, g, 0.0), 0.5);
  EXPECT_THROW(sojourn_time(std::vector<double>(2), g, 0.0), GridMismatchError);
}

TEST(SojournTime, MonteCarloMeanAtLevelZero) {
  const auto g = GridSpec::make(1, 100.0, 0.1);
  const FieldSampler sampler(kExp, g);
  const auto raw = simulate_sojourn_times(sampler, 0.0, 42, 4000, 1);
  double mean = 0.0, ss = 0.0;
  for (double x : raw) mean += x;
  mean /= raw.size();
  for (double x : raw) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (raw.size() - 1.0) / raw.size());
  EXPECT_NEAR(mean, 100.0 * normal_tail(0.0), 3.0 * se);
  for (double x : raw) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 100.0 + 1e-9);
  }
}

TEST(SojournTime, RiemannRefinementShrinks) {
  double prev = INFINITY;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto fine = GridSpec::make(1, 20.0, h / 2.0);
    const auto coarse = GridSpec::make(1, 20.0, h);
    ASSERT_EQ(fine.n, 2 * (coarse.n - 1) + 1);
    const FieldSampler sampler(kExp, fine);
    std::vector<double> f(fine.total_points()), c(coarse.total_points());
    double gap = 0.0;
    for (std::uint64_t r = 0; r < 400; ++r) {
      sampler.sample_into(5, r, f);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = f[2 * i];
      gap += std::abs(sojourn_time(f, fine, 0.5) - sojourn_time(c, coarse, 0.5));
    }
    gap /= 400.0;
    EXPECT_LT(gap, prev) << h;
    prev = gap;
  }
}

TEST(Normalize, Examples) {
  TheoryContext ctx;
  ctx.tail = normal_tail(1.0);
  const double T = 50.0;
  EXPECT_NEAR(normalize(T * ctx.tail, T, 1, 1.0, BoundMode::fixed, ctx).centered_normalized, 0.0, 1e-15);
  EXPECT_NEAR(normalize(T * ctx.tail + std::sqrt(T), T, 1, 1.0, BoundMode::fixed, ctx).centered_normalized, 1.0,
              1e-14);
  EXPECT_NEAR(normalize(T * T * ctx.tail + T, T, 2, 1.0, BoundMode::fixed, ctx).centered_normalized, 1.0, 1e-13);
  ctx.var_exact = 4.0;
  EXPECT_NEAR(normalize(T * ctx.tail + 2.0, T, 1, 1.0, BoundMode::moving, ctx).centered_normalized, 1.0, 1e-14);
  ctx.var_exact = 0.0;
  EXPECT_THROW(normalize(1.0, T, 1, 1.0, BoundMode::moving, ctx), DomainError);
}

TEST(Normalize, MovingLevelVarianceIsUnit) {
  const double T = 200.0, u = 4.0;
  const auto g = GridSpec::make(1, T, default_spacing(kExp));
  const FieldSampler sampler(kExp, g);
  TheoryContext ctx;
  ctx.tail = normal_tail(u);
  ctx.var_exact = var_sojourn_exact(kExp, g.T_grid(), u);
  const auto raw = simulate_sojourn_times(sampler, u, 42, 4000, 1);
  double mean = 0.0, ss = 0.0;
  std::vector<double> z;
  for (double x : raw) z.push_back(normalize(x, g.T_grid(), 1, u, BoundMode::moving, ctx).centered_normalized);
  for (double x : z) mean += x;
  mean /= z.size();
  for (double x : z) ss += (x - mean) * (x - mean);
  const double var = ss / (z.size() - 1.0);
  EXPECT_GE(var, 0.85);
  EXPECT_LE(var, 1.15);
}

TEST(Wasserstein, QuantileStratification) {
  const double sigma = 0.7;
  const std::size_t n = 10000;
  const auto x = quantile_samples(n, sigma);
  const double w = wasserstein1_to_gaussian(x, sigma);
  EXPECT_GT(w, 0.0);
  EXPECT_LT(w, 3.0 * sigma / n);

  // Independent oracle: trapezoid integration of |F_n - Φ(·/σ)| on a fine grid.
  const double step = 1e-4;
  double oracle = 0.0;
  std::size_t k = 0;
  for (double t = -8.0 * sigma; t < 8.0 * sigma; t += step) {
    const double mid = t + step / 2.0;
    while (k < n && x[k] <= mid) ++k;
    oracle += std::abs(static_cast<double>(k) / n - normal_cdf(mid / sigma)) * step;
  }
  EXPECT_NEAR(w, oracle, 2e-6);
}

TEST(Wasserstein, TranslationAddsShift) {
  const double sigma = 1.3, c = 0.5;
  auto x = quantile_samples(10000, sigma);
  const double base = wasserstein1_to_gaussian(x, sigma);
  for (double& v : x) v += c;
  EXPECT_NEAR(wasserstein1_to_gaussian(x, sigma), base + c, 0.01 * (base + c));
}

TEST(Wasserstein, PointMassLimitAndContract) {
  const std::vector<double> two{-2.0, 2.0};
  EXPECT_NEAR(wasserstein1_to_gaussian(two, 1e-9), 2.0, 1e-8);
  EXPECT_THROW(wasserstein1_to_gaussian(two, 0.0), DomainError);
  EXPECT_THROW(wasserstein1_to_gaussian(std::vector<double>{1.0}, 1.0), DomainError);
  EXPECT_THROW(wasserstein1_to_gaussian(std::vector<double>{1.0, NAN}, 1.0), DomainError);
}

TEST(Workers, EnvironmentCap) {
  unsetenv("SOJOURN_WORKERS");
  EXPECT_EQ(effective_workers(8), 8);
  EXPECT_EQ(effective_workers(0), 1);
  setenv("SOJOURN_WORKERS", "3", 1);
  EXPECT_EQ(effective_workers(8), 3);
  EXPECT_EQ(effective_workers(2), 2);
  unsetenv("SOJOURN_WORKERS");
}

TEST(FixedStudy, SmallRunIsDeterministicAcrossWorkers) {
  ExperimentConfig c;
  c.model = kExp;
  c.T_ladder = {10.0, 20.0};
  c.h = 0.1;
  c.replicates = 300;
  const auto a = run_fixed_level_study(c);
  c.workers = 3;
  const auto b = run_fixed_level_study(c);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.rows.size(), 2u);
  for (const auto& row : a.rows) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_TRUE(std::isfinite(row.W1_emp));
    EXPECT_TRUE(row.mean_within_3se);
    EXPECT_NEAR(row.sigma2_or_var, std::log(2.0) / 2.0, 1e-7);
  }
  c.mode = BoundMode::moving;
  EXPECT_THROW(run_fixed_level_study(c), ConfigError);
}

TEST(FixedStudy, EmpiricalVarianceMatchesSigma2) {
  ExperimentConfig c;
  c.model = kExp;
  c.T_ladder = {100.0};
  c.h = 0.1;
  c.replicates = 2000;
  const auto row = run_fixed_level_study(c).rows.back();
  const double se = row.sigma2_or_var * std::sqrt(2.0 / (c.replicates - 1.0));
  EXPECT_NEAR(row.emp_var_normalized, row.sigma2_or_var, 3.0 * se);
}

TEST(MovingStudy, CorollaryFlag) {
  ExperimentConfig c;
  c.model = kExp;
  c.mode = BoundMode::moving;
  c.T_ladder = {20.0};
  c.u_schedule = {1.0, 1.0};
  c.h = 0.05;
  c.replicates = 100;
  const auto r = run_moving_level_study(c);
  EXPECT_FALSE(r.rows[0].corollary_holds);
  EXPECT_NE(r.rows[0].status.find("corollary_condition_false"), std::string::npos);
}

TEST(MovingStudy, DistanceShrinksAlongLadder) {
  ExperimentConfig c;
  c.model = kExp;
  c.mode = BoundMode::moving;
  c.T_ladder = {50.0, 200.0, 800.0};
  c.u_schedule = {2.0, 0.01};
  c.replicates = 4000;
  const auto r = run_moving_level_study(c);
  ASSERT_EQ(r.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(r.rows[i].corollary_holds);
    EXPECT_TRUE(std::isfinite(r.rows[i].var_ratio));
    EXPECT_GT(r.rows[i].bound_total, 0.0);
    if (i > 0) EXPECT_LT(r.rows[i].W1_emp, r.rows[i - 1].W1_emp);
  }
}

TEST(ConfigValidate, Rejects) {
  ExperimentConfig c;
  c.T_ladder = {10.0, 5.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c.T_ladder = {10.0};
  c.replicates = 50;
  EXPECT_THROW(c.validate(), ConfigError);
  c.replicates = 100;
  EXPECT_NO_THROW(c.validate());
  c.mode = BoundMode::moving;
  c.beta = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Report, CsvRoundTripIsExact) {
  const auto r = sample_report();
  const auto back = report_from_csv(report_to_csv(r));
  EXPECT_EQ(back.mode, r.mode);
  EXPECT_EQ(back.model, r.model);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) EXPECT_TRUE(same_row(back.rows[i], r.rows[i])) << i;
}

TEST(Report, CsvQuoting) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  const auto rec = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n\"multi\nline\",,x\n");
  ASSERT_EQ(rec.size(), 2u);
  EXPECT_EQ(rec[0], (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rec[1], (std::vector<std::string>{"multi\nline", "", "x"}));
  EXPECT_THROW(parse_csv("\"open"), ConfigError);
  EXPECT_THROW(report_from_csv("nope\r\n"), ConfigError);
}

TEST(Report, SvgIsWellFormed) {
  const std::string svg = report_to_svg(sample_report());
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, tree));
  EXPECT_EQ(tree.count("svg"), 1u);
  EXPECT_NE(svg.find("W1 empirical"), std::string::npos);
  EXPECT_NE(svg.find("bound total"), std::string::npos);
  EXPECT_EQ(svg.find("href"), std::string::npos);
}

TEST(Report, EmitContract) {
  EXPECT_THROW(emit_report(ConvergenceReport{}, "/tmp/never.csv", ReportFormat::csv), DomainError);
  const std::string bad = "/nonexistent-dir/report.csv";
  try {
    emit_report(sample_report(), bad, ReportFormat::csv);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), bad);
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
  const auto path = (std::filesystem::temp_directory_path() / "sojourn_report_test.csv").string();
  emit_report(sample_report(), path, ReportFormat::csv);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  EXPECT_EQ(buf.str(), report_to_csv(sample_report()));
  std::filesystem::remove(path);
}

TEST(Config, ParsesFullFile) {
  const auto cfg = parse_config(R"({
    "model": {"kind": "cauchy", "beta": 1.5, "scale": 2.0, "d": 2},
    "grid": {"T": 40.0, "h": 0.2},
    "T_ladder": [10, 20, 40],
    "u_schedule": {"c": 2.0, "gamma": 0.01},
    "mode": "moving", "beta": 0.5, "replicates": 500, "seed": 7, "workers": 4})");
  const auto& c = cfg.experiment;
  EXPECT_EQ(c.model, CovarianceModel::cauchy(1.5, 2.0, 2));
  EXPECT_EQ(c.T_ladder, (std::vector<double>{10, 20, 40}));
  EXPECT_EQ(*c.h, 0.2);
  EXPECT_EQ(*cfg.grid_T, 40.0);
  EXPECT_EQ(c.mode, BoundMode::moving);
  EXPECT_EQ(c.u_schedule.c, 2.0);
  EXPECT_EQ(c.u_schedule.gamma, 0.01);
  EXPECT_EQ(c.beta, 0.5);
  EXPECT_EQ(c.replicates, 500u);
  EXPECT_EQ(c.master_seed, 7u);
  EXPECT_EQ(c.workers, 4);
}

TEST(Config, MinimalFileUsesGridEdgeAsLadder) {
  const auto cfg = parse_config(
      R"({"model": {"kind": "powered_exponential", "alpha": 1.0, "scale": 1.0, "d": 1},
          "grid": {"T": 100.0, "h": 0.1}, "seed": 42})");
  EXPECT_EQ(cfg.experiment.T_ladder, (std::vector<double>{100.0}));
  EXPECT_EQ(cfg.experiment.master_seed, 42u);
  EXPECT_EQ(cfg.experiment.mode, BoundMode::fixed);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config("[]"), ConfigError);
  EXPECT_THROW(parse_config(R"({"grid": {"T": 1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": {"kind": "matern"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": {"kind": "cauchy"}, "typo": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": {"kind": "cauchy", "alpha": "x"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": {"kind": "powered_exponential", "alpha": 3}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"model": {"kind": "cauchy"}, "seed": -1})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/cfg.json"), IoError);
}
