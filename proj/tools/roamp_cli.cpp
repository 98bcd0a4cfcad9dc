#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "roamp/errors.hpp"
#include "roamp/harness.hpp"
#include "roamp/spectra.hpp"
#include "roamp/state_evolution.hpp"

namespace {

struct ScalarArgs {
  double theta = 2.0;
  double delta = 0.5;
  std::string prior = "rademacher";
  double w0 = 0.04;
  std::string noise = "gaussian";
  int iterations = 15;
};

void add_scalar_options(CLI::App* cmd, ScalarArgs& a) {
  cmd->add_option("--theta", a.theta, "signal-to-noise ratio")->capture_default_str();
  cmd->add_option("--delta", a.delta, "aspect ratio M/N")->capture_default_str();
  cmd->add_option("--prior", a.prior, "rademacher or gaussian")->capture_default_str();
  cmd->add_option("--w0", a.w0, "side-information strength")->capture_default_str();
}

void print_fixed_point(const ScalarArgs& a, const roamp::PriorModel& prior) {
  const roamp::FixedPointResult fp = roamp::gaussian_fixed_point(a.theta, a.delta, prior, prior);
  std::printf("gaussian fixed point: w1=%.12f w2=%.12f mmse_u=%.12f mmse_v=%.12f (%d steps)\n", fp.w1,
              fp.w2, fp.mmse_u, fp.mmse_v, fp.iterations);
  if (fp.multiple)
    std::printf("second fixed point reached from w=1: w1=%.12f w2=%.12f\n", fp.alt_w1, fp.alt_w2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal AMP for rectangular spiked models with rotationally invariant noise"};
  app.require_subcommand(0, 1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  auto* run = app.add_subcommand("run", "simulate a configured experiment and write CSV");
  std::string cfg_path;
  int seeds = 0;
  std::string out;
  std::string methods;
  int workers = 0;
  run->add_option("config", cfg_path, "key = value configuration file")->required();
  run->add_option("--seeds", seeds, "number of seeds (overrides the config)");
  run->add_option("--out", out, "CSV output path (overrides the config)");
  run->add_option("--methods", methods, "comma-separated subset of oamp,pca,amp,se");
  run->add_option("--workers", workers, "parallel seeds (default ROAMP_WORKERS or 1)");

  auto* se = app.add_subcommand("se", "state-evolution predictions only");
  ScalarArgs se_args;
  add_scalar_options(se, se_args);
  se->add_option("--noise", se_args.noise, "gaussian | mp | beta:a,b,lo,hi | tabulated:path")
      ->capture_default_str();
  se->add_option("--iterations", se_args.iterations, "iterations")->capture_default_str();

  auto* check = app.add_subcommand("spectra-check", "analytic checks of the induced spectral measures");

  auto* fixed = app.add_subcommand("fixed-point", "solve the Gaussian-noise fixed-point system");
  ScalarArgs fp_args;
  add_scalar_options(fixed, fp_args);

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) {
      roamp::ExperimentConfig cfg = roamp::parse_config_file(cfg_path);
      if (seeds > 0) {
        cfg.seeds.clear();
        cfg.seed_count = seeds;
      }
      if (!out.empty()) cfg.out = out;
      if (!methods.empty()) cfg.methods = roamp::parse_methods(methods);
      if (workers > 0) cfg.workers = workers;
      if (cfg.out.empty()) cfg.out = "roamp_run.csv";
      roamp::validate(cfg);
      const roamp::AggregateReport report = roamp::run_experiment(cfg);
      roamp::emit_csv(report, cfg.out);
      roamp::emit_metadata(report, cfg.out + ".json");
      std::printf("wrote %s (%d seeds, %d failed)\n", cfg.out.c_str(), report.seeds_run, report.failures);
      return 0;
    }
    if (*se) {
      const roamp::PriorModel prior{roamp::parse_prior_kind(se_args.prior), se_args.w0};
      if (se_args.noise == "gaussian" || se_args.noise == "mp") print_fixed_point(se_args, prior);
      const roamp::SpectrumModel mu = roamp::analytic_spectrum(se_args.noise, se_args.delta);
      const roamp::InducedMeasures nu = roamp::build_induced_measures(roamp::ShrinkageSet(mu, se_args.theta));
      const roamp::OptimalSeResult r = roamp::optimal_se_run(nu, prior, prior, se_args.iterations);
      std::printf("%4s %12s %12s %12s %12s %14s %14s\n", "t", "rho1", "rho2", "w1", "w2", "pred_cos2_u",
                  "pred_cos2_v");
      for (const auto& s : r.states) {
        std::printf("%4d %12.6g %12.6g %12.9f %12.9f %14.9f %14.9f\n", s.t, s.rho1, s.rho2, s.w1, s.w2,
                    1.0 - s.mmse_u, 1.0 - s.mmse_v);
      }
      if (r.plateau_iteration > 0) std::printf("plateau at t=%d\n", r.plateau_iteration);
      return 0;
    }
    if (*check) {
      const int failures = roamp::spectra_check(std::cout);
      return failures == 0 ? 0 : 1;
    }
    if (*fixed) {
      const roamp::PriorModel prior{roamp::parse_prior_kind(fp_args.prior), fp_args.w0};
      print_fixed_point(fp_args, prior);
      return 0;
    }
    std::cerr << app.help();
    return 2;
  } catch (const roamp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
