// sojourn-clt: theory values, inequality checks, Monte Carlo studies and field dumps.

#include "sojourn/config.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/field_io.hpp"
#include "sojourn/hermite_chaos.hpp"
#include "sojourn/stein_bounds.hpp"
#include "sojourn/study_harness.hpp"
#include "sojourn/variance_theory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace sojourn;

struct ModelArgs {
  std::string kind = "powered_exponential";
  double alpha = 1.0;
  double beta = 1.0;
  double scale = 1.0;
  int d = 1;

  void add_to(CLI::App* app) {
    app->add_option("--kind", kind, "powered_exponential or cauchy")->capture_default_str();
    app->add_option("--alpha", alpha, "powered exponential exponent")->capture_default_str();
    app->add_option("--cauchy-beta", beta, "Cauchy decay exponent")->capture_default_str();
    app->add_option("--scale", scale)->capture_default_str();
    app->add_option("-d,--dim", d, "dimension, 1 or 2")->capture_default_str();
  }

  CovarianceModel build() const {
    CovarianceModel m;
    m.kind = parse_covariance_kind(kind);
    m.alpha = alpha;
    m.beta = beta;
    m.scale = scale;
    m.d = d;
    m.validate();
    return m;
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_row(const std::vector<std::string>& header, const std::vector<std::string>& values) {
  for (std::size_t i = 0; i < header.size(); ++i) std::cout << (i ? "," : "") << csv_escape(header[i]);
  std::cout << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) std::cout << (i ? "," : "") << csv_escape(values[i]);
  std::cout << '\n';
}

void print_bound(const RateBound& b) {
  print_row({"T", "u", "mode", "n_trunc", "d1", "d2", "d3", "term_body", "term_body_d1_form", "term_tail",
             "total", "tail_non_vanishing"},
            {num(b.T), num(b.u), to_string(b.mode), std::to_string(b.n_trunc), num(b.d1), num(b.d2), num(b.d3),
             num(b.term_body), num(b.term_body_d1_form), num(b.term_tail), num(b.total),
             b.tail_non_vanishing ? "true" : "false"});
  std::cerr << "constants:\n";
  for (const auto& c : b.constants_profile) {
    std::cerr << "  " << c.name << " = " << num(c.value) << " (" << c.provenance << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sojourn-time CLT toolkit for stationary Gaussian fields"};
  app.require_subcommand(1);

  // theory
  auto* theory = app.add_subcommand("theory", "deterministic quantities, one CSV row on stdout");
  theory->require_subcommand(1);
  ModelArgs model_args;
  double u = 0.0;
  double T = 100.0;
  double tol = 1e-8;
  double beta = 0.25;
  std::string mode = "fixed";

  auto* sigma2 = theory->add_subcommand("sigma2", "limiting variance σ²(u) by series and integral");
  model_args.add_to(sigma2);
  sigma2->add_option("-u,--level", u)->capture_default_str();
  sigma2->add_option("--tol", tol)->capture_default_str();

  auto* var_sojourn = theory->add_subcommand("var-sojourn", "exact Var(S_T) by quadrature");
  model_args.add_to(var_sojourn);
  var_sojourn->add_option("-u,--level", u)->capture_default_str();
  var_sojourn->add_option("-T,--horizon", T)->capture_default_str();

  auto* berman = theory->add_subcommand("berman-b", "asymptotic high-level variance density B(u)");
  model_args.add_to(berman);
  berman->add_option("-u,--level", u)->required();

  auto* bounds = theory->add_subcommand("bounds", "Wasserstein rate bound and its components");
  model_args.add_to(bounds);
  bounds->add_option("--mode", mode)->check(CLI::IsMember({"fixed", "moving"}))->capture_default_str();
  bounds->add_option("-u,--level", u)->capture_default_str();
  bounds->add_option("-T,--horizon", T)->capture_default_str();
  bounds->add_option("--beta", beta, "moving mode only, in (0, d/2)")->capture_default_str();

  // check
  auto* check = app.add_subcommand("check", "exact-arithmetic certificates");
  check->require_subcommand(1);
  auto* inequalities = check->add_subcommand("inequalities", "chaos variance inequality for p = 2..p_max");
  int p_max = 50;
  inequalities->add_option("--p-max", p_max)->check(CLI::Range(2, 100000))->capture_default_str();

  // study
  auto* study = app.add_subcommand("study", "Monte Carlo convergence study");
  std::string study_mode;
  std::string config_path;
  std::string out_path;
  std::string plot_path;
  int workers = 0;
  study->add_option("mode", study_mode, "fixed or moving")->required()->check(CLI::IsMember({"fixed", "moving"}));
  study->add_option("--config", config_path)->required();
  study->add_option("--out", out_path, "CSV report")->required();
  study->add_option("--plot", plot_path, "SVG plot of W1 and bound against T");
  study->add_option("--workers", workers, "overrides the config value");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "dump sampled fields to a binary file");
  std::uint64_t replicates = 0;
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--out", out_path)->required();
  simulate->add_option("--replicates", replicates, "overrides the config value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sigma2) {
      const auto d = sigma_squared_detail(model_args.build(), u, tol);
      print_row({"model", "u", "sigma2", "integral", "tail_bound", "terms"},
                {model_args.build().describe(), num(u), num(d.value), num(d.integral), num(d.tail_bound),
                 std::to_string(d.terms)});
    } else if (*var_sojourn) {
      const auto m = model_args.build();
      print_row({"model", "T", "u", "var_sojourn"}, {m.describe(), num(T), num(u), num(var_sojourn_exact(m, T, u))});
    } else if (*berman) {
      const auto m = model_args.build();
      print_row({"model", "u", "berman_constant", "B_asym"},
                {m.describe(), num(u), num(berman_constant(m)), num(berman_B_asymptotic(m, u))});
    } else if (*bounds) {
      const auto m = model_args.build();
      print_bound(mode == "fixed" ? fixed_level_bound(m, u, T) : moving_level_bound(m, u, T, beta));
    } else if (*inequalities) {
      bool all = true;
      std::cout << "p,lhs,rhs,holds\n";
      for (int p = 2; p <= p_max; ++p) {
        const auto cert = chaos_variance_inequality(p);
        all = all && cert.holds;
        std::cout << p << ',' << cert.lhs.str() << ',' << cert.rhs.str() << ',' << (cert.holds ? "true" : "false")
                  << '\n';
      }
      return all ? 0 : 1;
    } else if (*study) {
      ConfigFile cfg = load_config(config_path);
      ExperimentConfig& ec = cfg.experiment;
      ec.mode = parse_bound_mode(study_mode);
      if (workers > 0) ec.workers = workers;
      const ConvergenceReport report = run_study(ec);
      emit_report(report, out_path, ReportFormat::csv);
      if (!plot_path.empty()) emit_report(report, plot_path, ReportFormat::svg);
      int failed = 0;
      for (const auto& row : report.rows) {
        std::cerr << "T=" << row.T << " W1=" << row.W1_emp << " bound=" << row.bound_total
                  << " status=" << row.status << '\n';
        failed += row.status.rfind("error", 0) == 0;
      }
      return failed ? 1 : 0;
    } else if (*simulate) {
      const ConfigFile cfg = load_config(config_path);
      const ExperimentConfig& ec = cfg.experiment;
      double edge = 0.0;
      if (cfg.grid_T) {
        edge = *cfg.grid_T;
      } else if (!ec.T_ladder.empty()) {
        edge = ec.T_ladder.back();
      } else {
        throw ConfigError("simulate: config needs grid.T or T_ladder");
      }
      const GridSpec grid = GridSpec::make(ec.model.d, edge, ec.spacing());
      const FieldSampler sampler(ec.model, grid);
      const std::uint64_t count = replicates > 0 ? replicates : ec.replicates;
      write_field_dump(out_path, sampler, ec.master_seed, count);
      std::cerr << "wrote " << count << " fields of " << grid.total_points() << " points to " << out_path << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
